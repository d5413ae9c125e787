#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "mly/core/index.hpp"
#include "mly/core/rational.hpp"

namespace mly {

enum class BlockOperator { Zero, Identity };
enum class GeneratorTag { Factorial, Cubic, PowerOfTwoSpike, Custom };

std::string_view to_string(GeneratorTag tag) noexcept;

/// Half-open index interval [start, end) on which T_i = multiplier * I
/// (or T_i = O for a Zero block).
struct Block {
    Index start;
    Index end;
    Rational multiplier;
    BlockOperator op = BlockOperator::Identity;

    /// The scalar actually applied: 0 on Zero blocks.
    Rational effective() const { return op == BlockOperator::Zero ? Rational(0) : multiplier; }
    Index width() const noexcept { return end - start; }
};

/// A piecewise-constant schedule of scalar multiples of the identity tiling
/// [1, coverage_end()) without gaps.
class BlockSchedule {
public:
    BlockSchedule(std::vector<Block> blocks, GeneratorTag tag);

    std::span<const Block> blocks() const noexcept { return blocks_; }
    GeneratorTag tag() const noexcept { return tag_; }

    /// Exclusive end of the tiled range; indices 1..coverage_end()-1 are defined.
    Index coverage_end() const noexcept { return blocks_.back().end; }
    Index last_index() const noexcept { return coverage_end() - 1; }

    /// Block containing i; throws ScheduleExhausted past coverage.
    const Block& block_at(Index i) const;
    std::size_t block_position(Index i) const;
    Rational multiplier_at(Index i) const { return block_at(i).effective(); }

private:
    std::vector<Block> blocks_;
    GeneratorTag tag_;
};

}  // namespace mly

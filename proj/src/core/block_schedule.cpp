#include "mly/core/block_schedule.hpp"

#include <algorithm>

#include "mly/core/error.hpp"

namespace mly {

std::string_view to_string(GeneratorTag tag) noexcept {
    switch (tag) {
        case GeneratorTag::Factorial: return "factorial";
        case GeneratorTag::Cubic: return "cubic";
        case GeneratorTag::PowerOfTwoSpike: return "power2";
        case GeneratorTag::Custom: return "custom";
    }
    return "unknown";
}

BlockSchedule::BlockSchedule(std::vector<Block> blocks, GeneratorTag tag)
    : blocks_(std::move(blocks)), tag_(tag) {
    if (blocks_.empty()) throw Error(ErrorCode::InvalidArgument, "schedule needs at least one block");
    Index expected = 1;
    for (const auto& b : blocks_) {
        if (b.start != expected) {
            throw Error(ErrorCode::InvalidArgument,
                        "blocks must tile from 1 without gaps; got start " + to_string(b.start) +
                            " expected " + to_string(expected));
        }
        if (b.end <= b.start) throw Error(ErrorCode::InvalidArgument, "block end must exceed start");
        if (b.end - 1 > kMaxIndex) throw Error(ErrorCode::Overflow, "block end exceeds index range");
        expected = b.end;
    }
}

std::size_t BlockSchedule::block_position(Index i) const {
    if (i == 0) throw Error(ErrorCode::InvalidArgument, "operator indices start at 1");
    if (i >= coverage_end()) {
        throw Error(ErrorCode::ScheduleExhausted,
                    "index " + to_string(i) + " beyond schedule coverage " + to_string(coverage_end()));
    }
    auto it = std::upper_bound(blocks_.begin(), blocks_.end(), i,
                               [](Index key, const Block& b) { return key < b.end; });
    return static_cast<std::size_t>(it - blocks_.begin());
}

const Block& BlockSchedule::block_at(Index i) const {
    return blocks_[block_position(i)];
}

}  // namespace mly

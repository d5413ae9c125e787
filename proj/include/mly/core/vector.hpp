#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mly/core/index.hpp"

namespace mly {

enum class SpaceKind { RealLine, RealFiniteDim, EllOne };

/// The state space an orbit lives in. RealLine uses |x|, RealFiniteDim the
/// Euclidean norm, EllOne the l^1 norm over a finite support (the tail beyond
/// the stored support is identically zero).
struct Space {
    SpaceKind kind = SpaceKind::RealLine;
    std::size_t dim = 1;

    static Space real_line() { return {SpaceKind::RealLine, 1}; }
    static Space finite_dim(std::size_t d);
    static Space ell_one() { return {SpaceKind::EllOne, 0}; }

    bool admits(Index i) const noexcept;
    std::string to_string() const;

    friend bool operator==(const Space&, const Space&) = default;
};

struct Entry {
    Index index;  // 1-based coordinate
    double value;

    friend bool operator==(const Entry&, const Entry&) = default;
};

/// Immutable sparse vector. Entries are kept sorted by index, duplicates are
/// rejected and explicit zeros are pruned.
class Vector {
public:
    explicit Vector(Space space = Space::real_line());
    Vector(Space space, std::vector<Entry> entries);

    static Vector real(double value);
    static Vector basis(Space space, Index j, double value = 1.0);
    static Vector zero(Space space) { return Vector(space); }

    /// Literal forms: "3.5" on the real line; "1,2,0.5" dense finite-dim;
    /// "e5" or "2:1.5,7:-0.25" sparse l^1; "0" is the zero vector anywhere.
    static Vector parse(Space space, const std::string& literal);

    const Space& space() const noexcept { return space_; }
    std::span<const Entry> entries() const noexcept { return entries_; }
    bool is_zero() const noexcept { return entries_.empty(); }

    double norm() const noexcept;
    double value_at(Index j) const noexcept;
    /// Largest stored coordinate index, 0 for the zero vector.
    Index support_max() const noexcept;

    Vector scaled(double alpha) const;
    friend Vector operator+(const Vector& a, const Vector& b);
    friend Vector operator-(const Vector& a, const Vector& b);

    std::string to_string() const;

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    Space space_;
    std::vector<Entry> entries_;
};

/// Returns sum of alpha_l * v_l; all vectors must share one space.
Vector linear_combination(std::span<const double> alpha, std::span<const Vector> vectors);

}  // namespace mly

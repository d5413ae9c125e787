#include "mly/core/vector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mly/core/error.hpp"
#include "mly/core/kahan.hpp"

namespace mly {
namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "malformed number '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::InvalidArgument, "malformed number '" + text + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

Vector combine(const Vector& a, const Vector& b, double sign) {
    if (!(a.space() == b.space())) {
        throw Error(ErrorCode::SpaceMismatch, a.space().to_string() + " vs " + b.space().to_string());
    }
    std::vector<Entry> out;
    auto ia = a.entries().begin();
    auto ib = b.entries().begin();
    while (ia != a.entries().end() || ib != b.entries().end()) {
        if (ib == b.entries().end() || (ia != a.entries().end() && ia->index < ib->index)) {
            out.push_back(*ia++);
        } else if (ia == a.entries().end() || ib->index < ia->index) {
            out.push_back({ib->index, sign * ib->value});
            ++ib;
        } else {
            out.push_back({ia->index, ia->value + sign * ib->value});
            ++ia;
            ++ib;
        }
    }
    return Vector(a.space(), std::move(out));
}

}  // namespace

Space Space::finite_dim(std::size_t d) {
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
    return {SpaceKind::RealFiniteDim, d};
}

bool Space::admits(Index i) const noexcept {
    if (i == 0 || i > kMaxIndex) return false;
    switch (kind) {
        case SpaceKind::RealLine: return i == 1;
        case SpaceKind::RealFiniteDim: return i <= static_cast<Index>(dim);
        case SpaceKind::EllOne: return true;
    }
    return false;
}

std::string Space::to_string() const {
    switch (kind) {
        case SpaceKind::RealLine: return "R";
        case SpaceKind::RealFiniteDim: return "R^" + std::to_string(dim);
        case SpaceKind::EllOne: return "l1";
    }
    return "?";
}

Vector::Vector(Space space) : space_(space) {}

Vector::Vector(Space space, std::vector<Entry> entries) : space_(space) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const Entry& e = entries[k];
        if (!space_.admits(e.index)) {
            throw Error(ErrorCode::SpaceMismatch,
                        "coordinate " + mly::to_string(e.index) + " outside " + space_.to_string());
        }
        if (!std::isfinite(e.value)) throw Error(ErrorCode::InvalidArgument, "non-finite coordinate");
        if (k > 0 && entries[k - 1].index == e.index) {
            throw Error(ErrorCode::InvalidArgument, "duplicate coordinate " + mly::to_string(e.index));
        }
        if (e.value != 0.0) entries_.push_back(e);
    }
}

Vector Vector::real(double value) {
    return Vector(Space::real_line(), {{1, value}});
}

Vector Vector::basis(Space space, Index j, double value) {
    return Vector(space, {{j, value}});
}

Vector Vector::parse(Space space, const std::string& literal) {
    if (literal.empty()) throw Error(ErrorCode::InvalidArgument, "empty vector literal");
    if (literal == "0") return Vector(space);
    switch (space.kind) {
        case SpaceKind::RealLine:
            return Vector::real(parse_double(literal));
        case SpaceKind::RealFiniteDim: {
            const auto parts = split(literal, ',');
            if (parts.size() != space.dim) {
                throw Error(ErrorCode::SpaceMismatch, "expected " + std::to_string(space.dim) + " coordinates");
            }
            std::vector<Entry> entries;
            for (std::size_t k = 0; k < parts.size(); ++k) {
                entries.push_back({static_cast<Index>(k + 1), parse_double(parts[k])});
            }
            return Vector(space, std::move(entries));
        }
        case SpaceKind::EllOne: {
            if (literal.front() == 'e') return Vector::basis(space, parse_index(literal.substr(1)));
            std::vector<Entry> entries;
            for (const auto& part : split(literal, ',')) {
                const auto colon = part.find(':');
                if (colon == std::string::npos) {
                    throw Error(ErrorCode::InvalidArgument, "l1 literal entries look like index:value");
                }
                entries.push_back({parse_index(part.substr(0, colon)), parse_double(part.substr(colon + 1))});
            }
            return Vector(space, std::move(entries));
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown space");
}

double Vector::norm() const noexcept {
    CompensatedSum sum;
    if (space_.kind == SpaceKind::RealFiniteDim) {
        double scale = 0.0;
        for (const auto& e : entries_) scale = std::max(scale, std::fabs(e.value));
        if (scale == 0.0) return 0.0;
        for (const auto& e : entries_) {
            const double r = e.value / scale;
            sum.add(r * r);
        }
        return scale * std::sqrt(sum.value());
    }
    for (const auto& e : entries_) sum.add(std::fabs(e.value));
    return sum.value();
}

double Vector::value_at(Index j) const noexcept {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), j,
                               [](const Entry& e, Index key) { return e.index < key; });
    return (it != entries_.end() && it->index == j) ? it->value : 0.0;
}

Index Vector::support_max() const noexcept {
    return entries_.empty() ? Index{0} : entries_.back().index;
}

Vector Vector::scaled(double alpha) const {
    if (!std::isfinite(alpha)) throw Error(ErrorCode::InvalidArgument, "non-finite scale factor");
    std::vector<Entry> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back({e.index, alpha * e.value});
    return Vector(space_, std::move(out));
}

Vector operator+(const Vector& a, const Vector& b) { return combine(a, b, 1.0); }
Vector operator-(const Vector& a, const Vector& b) { return combine(a, b, -1.0); }

std::string Vector::to_string() const {
    if (entries_.empty()) return "0";
    if (space_.kind == SpaceKind::RealLine) return format_double(entries_.front().value);
    std::string out;
    if (space_.kind == SpaceKind::RealFiniteDim) {
        for (std::size_t k = 1; k <= space_.dim; ++k) {
            if (k > 1) out += ',';
            out += format_double(value_at(static_cast<Index>(k)));
        }
        return out;
    }
    for (const auto& e : entries_) {
        if (!out.empty()) out += ',';
        out += mly::to_string(e.index) + ":" + format_double(e.value);
    }
    return out;
}

Vector linear_combination(std::span<const double> alpha, std::span<const Vector> vectors) {
    if (alpha.size() != vectors.size() || vectors.empty()) {
        throw Error(ErrorCode::InvalidArgument, "coefficient count must match vector count");
    }
    Vector out(vectors.front().space());
    for (std::size_t l = 0; l < vectors.size(); ++l) {
        if (alpha[l] != 0.0) out = out + vectors[l].scaled(alpha[l]);
    }
    return out;
}

}  // namespace mly

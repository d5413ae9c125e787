#include "mly/core/index.hpp"

#include <algorithm>

#include "mly/core/error.hpp"

namespace mly {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::SpaceMismatch: return "SpaceMismatch";
        case ErrorCode::IndexOverflow: return "IndexOverflow";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::ScheduleExhausted: return "ScheduleExhausted";
        case ErrorCode::NotBlockStructured: return "NotBlockStructured";
        case ErrorCode::EmptySelection: return "EmptySelection";
        case ErrorCode::EmptySamples: return "EmptySamples";
        case ErrorCode::ZeroDirection: return "ZeroDirection";
        case ErrorCode::DegeneratePair: return "DegeneratePair";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::NoSensitivity: return "NoSensitivity";
        case ErrorCode::SearchExhausted: return "SearchExhausted";
    }
    return "Unknown";
}

std::string to_string(Index value) {
    if (value == 0) return "0";
    std::string out;
    while (value > 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
        value /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::string to_string_signed(Wide value) {
    if (value < 0) {
        // -(value) is safe: Rational never stores the minimum value
        return "-" + to_string(static_cast<Index>(-value));
    }
    return to_string(static_cast<Index>(value));
}

Index parse_index(std::string_view text) {
    if (text.empty()) throw Error(ErrorCode::InvalidArgument, "empty index literal");
    Index value = 0;
    for (char c : text) {
        if (c < '0' || c > '9') {
            throw Error(ErrorCode::InvalidArgument, "malformed index literal '" + std::string(text) + "'");
        }
        const auto digit = static_cast<Index>(c - '0');
        if (value > (kMaxIndex - digit) / 10) {
            throw Error(ErrorCode::IndexOverflow, "index literal exceeds 2^127-1: " + std::string(text));
        }
        value = value * 10 + digit;
    }
    return value;
}

double to_double(Index value) noexcept {
    return static_cast<double>(value);
}

Index checked_add(Index a, Index b) {
    Index out = 0;
    if (__builtin_add_overflow(a, b, &out) || out > kMaxIndex) {
        throw Error(ErrorCode::Overflow, "index addition exceeds 2^127-1");
    }
    return out;
}

Index checked_mul(Index a, Index b) {
    Index out = 0;
    if (__builtin_mul_overflow(a, b, &out) || out > kMaxIndex) {
        throw Error(ErrorCode::Overflow, "index multiplication exceeds 2^127-1");
    }
    return out;
}

void require_valid_index(Index i) {
    if (i == 0) throw Error(ErrorCode::InvalidArgument, "operator indices start at 1");
    if (i > kMaxIndex) throw Error(ErrorCode::IndexOverflow, "index exceeds 2^127-1");
}

}  // namespace mly

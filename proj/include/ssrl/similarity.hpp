// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "ssrl/error.hpp"

namespace ssrl {

/// Cosine of two non-negative vectors of equal length. A zero vector has no
/// direction; its similarity to anything is defined as 0.
template <typename T>
double cosine_similarity(std::span<const T> a, std::span<const T> b) {
    if (a.size() != b.size()) throw DomainError("cosine_similarity: length mismatch");
    long double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const long double x = static_cast<long double>(a[i]);
        const long double y = static_cast<long double>(b[i]);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if (na == 0 || nb == 0) return 0.0;
    const double c = static_cast<double>(dot / (std::sqrt(na) * std::sqrt(nb)));
    return std::clamp(c, 0.0, 1.0);
}

}  // namespace ssrl

// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <algorithm>

#include "ssrl/error.hpp"

namespace ssrl {

template <typename Sample>
std::vector<WindowSlice<Sample>> windows(std::span<const Sample> samples, Millis size, Millis hop,
                                         std::optional<Millis> until) {
    if (size <= 0 || hop <= 0) throw DomainError("windows: size and hop must be positive");
    std::vector<WindowSlice<Sample>> out;
    Millis last = 0;
    if (until) {
        last = *until;
    } else if (!samples.empty()) {
        last = samples.back().t;
    } else {
        return out;
    }
    if (last < 0) return out;

    const auto by_time = [](const Sample& s, Millis t) { return s.t < t; };
    for (std::int64_t k = 0; k * hop <= last; ++k) {
        Window w{k, k * hop, k * hop + size};
        auto lo = std::lower_bound(samples.begin(), samples.end(), w.start, by_time);
        auto hi = std::lower_bound(lo, samples.end(), w.end, by_time);
        out.push_back({w, std::span<const Sample>(lo, hi)});
    }
    return out;
}

}  // namespace ssrl

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "confres/domain.hpp"
#include "confres/errors.hpp"
#include "confres/rng.hpp"
#include "confres/toml.hpp"

namespace confres {

using ProfileMap = std::map<std::string, ResidentProfile>;

namespace detail {

// Uniform integer in [lo, hi], derived from (seed, resident, field) so the
// draw does not depend on file order.
inline int sample_field(std::uint64_t seed, const std::string& resident_id,
                        std::string_view field, int lo, int hi) {
    rng::Philox gen(seed, rng::mix(rng::hash_str(resident_id), rng::hash_str(field)));
    return lo + int(gen.next_u01() * double(hi - lo + 1));
}

}  // namespace detail

/// Reads resident profiles. Fields left out of a [[resident]] entry are
/// filled from the [augment] section's uniform ranges using its seed; with
/// no [augment] section every field is required.
inline ProfileMap load_profiles_toml(const toml::Value& root) {
    const toml::Value* augment = root.find("augment");
    std::uint64_t seed = 0;
    if (augment) seed = std::uint64_t(augment->get_int("seed", 0));

    auto field = [&](const toml::Value& entry, const std::string& id, const char* key,
                     int fallback_lo, int fallback_hi) -> int {
        if (const toml::Value* v = entry.find(key)) return int(v->as_int());
        if (!augment)
            throw Error("profiles", "MissingField",
                        "resident '" + id + "' lacks '" + key + "' and no [augment] section is present");
        int lo = fallback_lo, hi = fallback_hi;
        if (const toml::Value* range = augment->find(key)) {
            auto vals = range->as_array();
            if (vals.size() != 2)
                throw Error("profiles", "BadRange", std::string("augment range for '") + key +
                                                        "' must be [lo, hi]");
            lo = int(vals[0].as_int());
            hi = int(vals[1].as_int());
        }
        return detail::sample_field(seed, id, key, lo, hi);
    };

    ProfileMap out;
    const toml::Value* residents = root.find("resident");
    if (!residents)
        throw Error("profiles", "MissingField", "no [[resident]] entries");
    for (const toml::Value& entry : residents->as_array()) {
        ResidentProfile p;
        p.resident_id = entry.at("id").as_string();
        p.age = field(entry, p.resident_id, "age", 18, 80);
        p.visual_impairment = field(entry, p.resident_id, "vi", 0, 5);
        p.hearing_impairment = field(entry, p.resident_id, "hi", 0, 5);
        p.illness = field(entry, p.resident_id, "illness", 0, 5);
        if (auto err = validate_profile(p)) throw *err;
        if (out.count(p.resident_id))
            throw Error("profiles", "DuplicateResident", "resident '" + p.resident_id + "' listed twice");
        out[p.resident_id] = p;
    }
    return out;
}

inline ProfileMap load_profiles(const std::string& path) {
    return load_profiles_toml(toml::load_file(path));
}

}  // namespace confres

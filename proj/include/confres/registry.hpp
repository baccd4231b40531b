#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "confres/domain.hpp"
#include "confres/errors.hpp"
#include "confres/toml.hpp"

namespace confres {

/// Declared per attribute name; units are never inferred from data.
struct AttributeInfo {
    std::string name;
    std::string unit;
    double granularity = 1.0;  // rounding step for resolved setpoints
};

/// Maps a sensor-id prefix onto the service it manifests. Entries with an
/// attribute name carry numeric readings into events of the same service and
/// location; entries without one delimit events via ON/OFF tokens.
struct SensorRule {
    std::string prefix;
    std::string service_id;
    std::string location;
    std::string attribute;  // empty for switch-style sensors
};

class SensorRegistry {
public:
    void add_attribute(AttributeInfo info) { attributes_[info.name] = std::move(info); }
    void add_service(Service s) { services_[s.service_id] = std::move(s); }

    void add_rule(SensorRule rule) {
        rules_.push_back(std::move(rule));
        // longest prefix wins, ties resolved lexicographically
        std::sort(rules_.begin(), rules_.end(), [](const SensorRule& a, const SensorRule& b) {
            if (a.prefix.size() != b.prefix.size()) return a.prefix.size() > b.prefix.size();
            return a.prefix < b.prefix;
        });
    }

    const SensorRule* match(std::string_view sensor_id) const {
        for (const auto& rule : rules_)
            if (sensor_id.substr(0, rule.prefix.size()) == rule.prefix) return &rule;
        return nullptr;
    }

    const AttributeInfo* attribute(std::string_view name) const {
        auto it = attributes_.find(std::string(name));
        return it == attributes_.end() ? nullptr : &it->second;
    }

    double granularity(std::string_view attribute_name) const {
        const AttributeInfo* info = attribute(attribute_name);
        return info ? info->granularity : 1.0;
    }

    const Service* service(std::string_view id) const {
        auto it = services_.find(std::string(id));
        return it == services_.end() ? nullptr : &it->second;
    }

    std::string service_name(std::string_view id) const {
        const Service* s = service(id);
        return s ? s->service_name : std::string(id);
    }

    const std::vector<SensorRule>& rules() const { return rules_; }
    const std::map<std::string, AttributeInfo>& attributes() const { return attributes_; }
    const std::map<std::string, Service>& services() const { return services_; }

    static SensorRegistry from_toml(const toml::Value& root) {
        SensorRegistry reg;
        if (const toml::Value* attrs = root.find("attribute")) {
            for (const toml::Value& a : attrs->as_array()) {
                AttributeInfo info;
                info.name = a.at("name").as_string();
                info.unit = a.at("unit").as_string();
                info.granularity = a.get_float("granularity", 1.0);
                if (info.name.empty() || info.unit.empty())
                    throw Error("registry", "MissingField", "attribute needs name and unit");
                reg.add_attribute(std::move(info));
            }
        }
        if (const toml::Value* services = root.find("service")) {
            for (const toml::Value& s : services->as_array()) {
                Service svc;
                svc.service_id = s.at("id").as_string();
                svc.service_name = s.get_string("name", svc.service_id);
                if (const toml::Value* fns = s.find("functional"))
                    for (const toml::Value& f : fns->as_array())
                        svc.functional_attrs.insert(f.as_string());
                if (const toml::Value* attrs = s.find("attributes")) {
                    for (const toml::Value& name : attrs->as_array()) {
                        const AttributeInfo* info = reg.attribute(name.as_string());
                        if (!info)
                            throw Error("registry", "UndeclaredAttribute",
                                        "service '" + svc.service_id + "' references attribute '" +
                                            name.as_string() + "' with no declared unit");
                        svc.nonfunctional_attrs[info->name] = QAttribute{0.0, info->unit};
                    }
                }
                if (auto err = validate_service(svc)) throw *err;
                reg.add_service(std::move(svc));
            }
        }
        if (const toml::Value* sensors = root.find("sensor")) {
            for (const toml::Value& s : sensors->as_array()) {
                SensorRule rule;
                rule.prefix = s.at("prefix").as_string();
                rule.service_id = s.at("service").as_string();
                rule.location = s.at("location").as_string();
                rule.attribute = s.get_string("attribute", "");
                if (rule.prefix.empty() || rule.service_id.empty() || rule.location.empty())
                    throw Error("registry", "MissingField", "sensor needs prefix, service, location");
                if (!rule.attribute.empty() && !reg.attribute(rule.attribute))
                    throw Error("registry", "UndeclaredAttribute",
                                "sensor prefix '" + rule.prefix + "' references attribute '" +
                                    rule.attribute + "' with no declared unit");
                reg.add_rule(std::move(rule));
            }
        }
        return reg;
    }

    static SensorRegistry load(const std::string& path) {
        return from_toml(toml::load_file(path));
    }

private:
    std::vector<SensorRule> rules_;
    std::map<std::string, AttributeInfo> attributes_;
    std::map<std::string, Service> services_;
};

}  // namespace confres

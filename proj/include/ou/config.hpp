#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ou/grid.hpp"
#include "ou/model.hpp"
#include "ou/semigroup.hpp"
#include "ou/thickset.hpp"

namespace ou {

/// Flat key-value experiment configuration with dotted sections
/// (e.g. "model.Q = 1 0 0 1"). Unknown keys are rejected; parse -> serialize
/// round trips losslessly up to whitespace.
class ExperimentConfig {
public:
    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_string(const std::string& text);

    /// Validates the key name; later calls override earlier values.
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    /// Canonical text form (sorted keys).
    std::string serialize() const;

    // Typed accessors. Missing required keys and malformed values throw
    // ConfigError naming the key.
    OUModel model() const;
    GridSpec grid(const OUModel& m) const;  // resolves grid.L = auto
    ThickSetSpec observation_set() const;
    PropagatorConfig propagator() const;

    double get_real(const std::string& key, std::optional<double> fallback = {}) const;
    int get_int(const std::string& key, std::optional<int> fallback = {}) const;
    std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::vector<double> get_reals(const std::string& key,
                                  std::optional<std::vector<double>> fallback = {}) const;
    std::vector<std::uint64_t> get_seeds(const std::string& key,
                                         std::vector<std::uint64_t> fallback) const;

private:
    std::map<std::string, std::string> values_;
};

/// Minimal deterministic JSON emitter: insertion-ordered keys, floats
/// printed with 17 significant digits, LF newlines.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array(const std::string& key);
    JsonWriter& end_array();
    JsonWriter& field(const std::string& key, double v);
    JsonWriter& field(const std::string& key, int v);
    JsonWriter& field(const std::string& key, std::uint64_t v);
    JsonWriter& field(const std::string& key, bool v);
    JsonWriter& field(const std::string& key, const std::string& v);
    JsonWriter& field(const std::string& key, const std::vector<double>& v);
    JsonWriter& element(double v);
    std::string str() const { return out_; }

    static std::string number(double v);

private:
    void comma();
    std::string out_;
    bool need_comma_ = false;
};

}  // namespace ou

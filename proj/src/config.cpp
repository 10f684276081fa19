#include "fueltreat/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace fueltreat {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!known.count(key)) throw std::invalid_argument("unknown config key '" + where + key + "'");
    }
}

template <typename T>
void take(const json& obj, const char* key, T& target) {
    if (obj.contains(key)) target = obj.at(key).get<T>();
}

}  // namespace

ExperimentConfig read_config(std::istream& in) {
    ExperimentConfig cfg;
    json doc;
    try {
        doc = json::parse(in);
        if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
        reject_unknown(doc,
                       {"sizes", "replicates", "horizon", "budget_fraction", "settings", "seed", "solver",
                        "anneal", "exact", "age_probabilities", "cell", "ramp_low", "threads", "emit_mps",
                        "output_dir", "illustration"},
                       "");
        if (doc.contains("sizes")) {
            cfg.sizes.clear();
            for (const auto& s : doc.at("sizes")) {
                const auto dims = s.get<std::vector<int>>();
                if (dims.size() != 2) throw std::invalid_argument("each size must be [rows, cols]");
                cfg.sizes.push_back(GridSize{dims[0], dims[1]});
            }
        }
        take(doc, "replicates", cfg.replicates);
        take(doc, "horizon", cfg.horizon);
        take(doc, "budget_fraction", cfg.budget_fraction);
        take(doc, "settings", cfg.settings);
        take(doc, "seed", cfg.seed);
        if (doc.contains("solver")) cfg.solver = solver_kind_from_string(doc.at("solver").get<std::string>());
        if (doc.contains("anneal")) {
            const auto& a = doc.at("anneal");
            reject_unknown(a, {"initial_temperature", "cooling_rate", "iterations", "target_penalty_weight", "seed"},
                           "anneal.");
            take(a, "initial_temperature", cfg.anneal.initial_temperature);
            take(a, "cooling_rate", cfg.anneal.cooling_rate);
            take(a, "iterations", cfg.anneal.iterations);
            take(a, "target_penalty_weight", cfg.anneal.target_penalty_weight);
            take(a, "seed", cfg.anneal.seed);
        }
        if (doc.contains("exact")) {
            const auto& e = doc.at("exact");
            reject_unknown(e, {"cap"}, "exact.");
            take(e, "cap", cfg.exact.cap);
        }
        if (doc.contains("age_probabilities")) {
            cfg.ages.probabilities = doc.at("age_probabilities").get<std::vector<double>>();
        }
        if (doc.contains("cell")) {
            const auto& c = doc.at("cell");
            reject_unknown(c, {"area", "mature_threshold", "high_threshold", "min_tfi", "max_tfi"}, "cell.");
            take(c, "area", cfg.cell.area);
            take(c, "mature_threshold", cfg.cell.mature_threshold);
            take(c, "high_threshold", cfg.cell.high_threshold);
            take(c, "min_tfi", cfg.cell.min_tfi);
            take(c, "max_tfi", cfg.cell.max_tfi);
        }
        take(doc, "ramp_low", cfg.ramp_low);
        take(doc, "threads", cfg.threads);
        take(doc, "emit_mps", cfg.emit_mps);
        take(doc, "output_dir", cfg.output_dir);
        if (doc.contains("illustration")) {
            const auto& il = doc.at("illustration");
            reject_unknown(il, {"rows", "cols", "horizon", "landscape"}, "illustration.");
            take(il, "rows", cfg.illustration_rows);
            take(il, "cols", cfg.illustration_cols);
            take(il, "horizon", cfg.illustration_horizon);
            take(il, "landscape", cfg.illustration_landscape);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path);
    return read_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
    json doc;
    json sizes = json::array();
    for (const auto& s : cfg.sizes) sizes.push_back({s.rows, s.cols});
    doc["sizes"] = sizes;
    doc["replicates"] = cfg.replicates;
    doc["horizon"] = cfg.horizon;
    doc["budget_fraction"] = cfg.budget_fraction;
    doc["settings"] = cfg.settings;
    doc["seed"] = cfg.seed;
    doc["solver"] = std::string(to_string(cfg.solver));
    doc["anneal"] = {{"initial_temperature", cfg.anneal.initial_temperature},
                     {"cooling_rate", cfg.anneal.cooling_rate},
                     {"iterations", cfg.anneal.iterations},
                     {"target_penalty_weight", cfg.anneal.target_penalty_weight},
                     {"seed", cfg.anneal.seed}};
    doc["exact"] = {{"cap", cfg.exact.cap}};
    doc["age_probabilities"] = cfg.ages.probabilities;
    doc["cell"] = {{"area", cfg.cell.area},
                   {"mature_threshold", cfg.cell.mature_threshold},
                   {"high_threshold", cfg.cell.high_threshold},
                   {"min_tfi", cfg.cell.min_tfi},
                   {"max_tfi", cfg.cell.max_tfi}};
    doc["ramp_low"] = cfg.ramp_low;
    doc["threads"] = cfg.threads;
    doc["emit_mps"] = cfg.emit_mps;
    doc["output_dir"] = cfg.output_dir;
    doc["illustration"] = {{"rows", cfg.illustration_rows},
                           {"cols", cfg.illustration_cols},
                           {"horizon", cfg.illustration_horizon},
                           {"landscape", cfg.illustration_landscape}};
    out << doc.dump(2) << '\n';
}

void save_config(const std::string& path, const ExperimentConfig& config) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_config(out, config);
}

}  // namespace fueltreat

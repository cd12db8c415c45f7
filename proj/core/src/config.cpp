#include "vrnet/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace vrnet {

namespace {

using nlohmann::json;

// Reads the listed keys of one section and rejects any other key.
class Section {
public:
    Section(const json& root, const char* name) : name_(name) {
        if (!root.contains(name)) return;
        node_ = &root.at(name);
        if (!node_->is_object()) throw ConfigError(std::string("section '") + name + "' must be an object");
    }

    template <typename T>
    void read(const char* key, T& field) {
        seen_.insert(key);
        if (node_ == nullptr || !node_->contains(key)) return;
        try {
            field = node_->at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(std::string("'") + name_ + "." + key + "' has the wrong type");
        }
    }

    void finish() const {
        if (node_ == nullptr) return;
        for (const auto& [k, v] : node_->items())
            if (!seen_.contains(k)) throw ConfigError(std::string("unknown key '") + name_ + "." + k + "'");
    }

private:
    const char* name_;
    const json* node_ = nullptr;
    std::set<std::string> seen_;
};

}  // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [k, v] : root.items())
        if (k != "scenario" && k != "learning" && k != "esn") throw ConfigError("unknown section '" + k + "'");

    RunConfig cfg;
    ScenarioConfig& s = cfg.scenario;
    Section sc(root, "scenario");
    sc.read("area_radius_m", s.area_radius_m);
    sc.read("sbs_coverage_m", s.sbs_coverage_m);
    sc.read("n_sbs", s.n_sbs);
    sc.read("n_users", s.n_users);
    sc.read("p_sbs_dbm", s.p_sbs_dbm);
    sc.read("p_user_dbm", s.p_user_dbm);
    sc.read("noise_dbm", s.noise_dbm);
    sc.read("pathloss_exp", s.pathloss_exp);
    sc.read("n_dl_blocks", s.n_dl_blocks);
    sc.read("n_ul_blocks", s.n_ul_blocks);
    sc.read("block_bandwidth_hz", s.block_bandwidth_hz);
    sc.read("image_bits", s.image_bits);
    sc.read("tracking_bits", s.tracking_bits);
    sc.read("compute_bits", s.compute_bits);
    sc.read("gamma_d_s", s.gamma_d_s);
    sc.read("min_distance_m", s.min_distance_m);
    sc.read("seed", s.seed);
    sc.finish();

    EpisodeOptions& e = cfg.episode;
    LearnerConfig& l = e.learner;
    std::string mode = to_string(e.utility_mode);
    Section lr(root, "learning");
    lr.read("epsilon", l.epsilon);
    lr.read("epsilon_decay", l.epsilon_decay);
    lr.read("q_alpha", l.q_alpha);
    lr.read("convergence_window", l.convergence_window);
    lr.read("utility_mode", mode);
    lr.read("table_cap", e.table_cap);
    lr.read("demand_bps", e.demand_bps);
    lr.finish();

    std::string rule = to_string(l.step_rule);
    Section es(root, "esn");
    es.read("n_w", l.n_w);
    es.read("in_scale", l.in_scale);
    es.read("res_scale", l.res_scale);
    es.read("bias_scale", l.bias_scale);
    es.read("step_rule", rule);
    es.read("lambda0", l.lambda0);
    es.read("lambda_const", l.lambda_const);
    es.read("normalized_step", l.normalized_step);
    es.finish();

    try {
        e.utility_mode = parse_utility_mode(mode);
        l.step_rule = parse_step_rule(rule);
        s.validate();
        l.validate();
        if (!(e.demand_bps > 0.0)) throw std::invalid_argument("demand_bps must be > 0");
    } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what());
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& cfg) {
    const ScenarioConfig& s = cfg.scenario;
    const LearnerConfig& l = cfg.episode.learner;
    nlohmann::ordered_json j;
    j["scenario"] = {{"area_radius_m", s.area_radius_m},   {"sbs_coverage_m", s.sbs_coverage_m},
                     {"n_sbs", s.n_sbs},                   {"n_users", s.n_users},
                     {"p_sbs_dbm", s.p_sbs_dbm},           {"p_user_dbm", s.p_user_dbm},
                     {"noise_dbm", s.noise_dbm},           {"pathloss_exp", s.pathloss_exp},
                     {"n_dl_blocks", s.n_dl_blocks},       {"n_ul_blocks", s.n_ul_blocks},
                     {"block_bandwidth_hz", s.block_bandwidth_hz}, {"image_bits", s.image_bits},
                     {"tracking_bits", s.tracking_bits},   {"compute_bits", s.compute_bits},
                     {"gamma_d_s", s.gamma_d_s},           {"min_distance_m", s.min_distance_m},
                     {"seed", s.seed}};
    j["learning"] = {{"epsilon", l.epsilon},
                     {"epsilon_decay", l.epsilon_decay},
                     {"q_alpha", l.q_alpha},
                     {"convergence_window", l.convergence_window},
                     {"utility_mode", to_string(cfg.episode.utility_mode)},
                     {"table_cap", cfg.episode.table_cap},
                     {"demand_bps", cfg.episode.demand_bps}};
    j["esn"] = {{"n_w", l.n_w},
                {"in_scale", l.in_scale},
                {"res_scale", l.res_scale},
                {"bias_scale", l.bias_scale},
                {"step_rule", to_string(l.step_rule)},
                {"lambda0", l.lambda0},
                {"lambda_const", l.lambda_const},
                {"normalized_step", l.normalized_step}};
    return j.dump(2) + "\n";
}

}  // namespace vrnet

#include "tanlock/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tanlock {

ConfigError::ConfigError(const std::string& message, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

std::string format_double(double value) {
    if(std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::vector<double> SweepConfig::grid() const {
    if(!snr_list.empty()) return snr_list;
    std::vector<double> values;
    if(!(snr_step > 0.0)) return values;
    const auto steps = static_cast<std::size_t>(std::floor((snr_max - snr_min) / snr_step + 1e-9));
    for(std::size_t i = 0; i <= steps; ++i) values.push_back(snr_min + static_cast<double>(i) * snr_step);
    return values;
}

namespace {

std::string_view trim(std::string_view s) {
    while(!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while(!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double to_double(std::string_view text, std::size_t line) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if(ec != std::errc{} || ptr != end || text.empty())
        throw ConfigError("expected a number, got '" + std::string(text) + "'", line);
    return value;
}

std::uint64_t to_unsigned(std::string_view text, std::size_t line) {
    std::uint64_t value = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if(ec != std::errc{} || ptr != end || text.empty())
        throw ConfigError("expected a non-negative integer, got '" + std::string(text) + "'", line);
    return value;
}

bool to_bool(std::string_view text, std::size_t line) {
    if(text == "true" || text == "1" || text == "yes") return true;
    if(text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("expected true/false, got '" + std::string(text) + "'", line);
}

std::optional<double> to_optional_double(std::string_view text, std::size_t line, std::string_view none_word) {
    if(text == none_word) return std::nullopt;
    return to_double(text, line);
}

template <typename Enum>
Enum to_enum(std::string_view text, std::size_t line, std::initializer_list<std::pair<std::string_view, Enum>> options) {
    std::string allowed;
    for(const auto& [name, value] : options) {
        if(text == name) return value;
        allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    }
    throw ConfigError("expected one of {" + allowed + "}, got '" + std::string(text) + "'", line);
}

std::string_view to_string(JitterWindowPolicy policy) {
    return policy == JitterWindowPolicy::post_lock_half ? "post_lock_half" : "tail_half";
}

struct ParseTarget {
    Scenario scenario;
    std::optional<double> base_frequency;  // auto = S * M
};

using Setter = std::function<void(ParseTarget&, std::string_view, std::size_t)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"name", [](ParseTarget& p, std::string_view v, std::size_t) { p.scenario.name = std::string(v); }},
        {"loop.variant",
         [](ParseTarget& p, std::string_view v, std::size_t l) {
             p.scenario.synth.loop.variant = to_enum<Variant>(v, l, {{"ndtl", Variant::ndtl}, {"tdtl", Variant::tdtl}});
         }},
        {"loop.dco_law",
         [](ParseTarget& p, std::string_view v, std::size_t l) {
             p.scenario.synth.loop.dco_law =
                 to_enum<DcoLaw>(v, l, {{"period", DcoLaw::period}, {"frequency", DcoLaw::frequency}});
         }},
        {"loop.dco_sensitivity",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.synth.loop.dco_sensitivity = to_double(v, l); }},
        {"loop.dco_dc_constant",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.synth.loop.dco_dc_constant = to_double(v, l); }},
        {"loop.filter_gain",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.synth.loop.filter_gain = to_double(v, l); }},
        {"loop.tdtl_delay",
         [](ParseTarget& p, std::string_view v, std::size_t l) {
             p.scenario.synth.loop.tdtl_delay = to_optional_double(v, l, "auto");
         }},
        {"loop.f_floor",
         [](ParseTarget& p, std::string_view v, std::size_t l) {
             p.scenario.synth.loop.f_floor = to_optional_double(v, l, "auto");
         }},
        {"loop.f_ceil",
         [](ParseTarget& p, std::string_view v, std::size_t l) {
             p.scenario.synth.loop.f_ceil = to_optional_double(v, l, "auto");
         }},
        {"stimulus.base_frequency",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.base_frequency = to_optional_double(v, l, "auto"); }},
        {"stimulus.step_value",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.stimulus.step_value = to_double(v, l); }},
        {"stimulus.step_scale",
         [](ParseTarget& p, std::string_view v, std::size_t l) {
             p.scenario.stimulus.step_scale = to_optional_double(v, l, "auto");
         }},
        {"stimulus.step_time",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.stimulus.step_time = to_double(v, l); }},
        {"stimulus.amplitude",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.stimulus.amplitude = to_double(v, l); }},
        {"stimulus.initial_phase",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.stimulus.initial_phase = to_double(v, l); }},
        {"stimulus.snr_db",
         [](ParseTarget& p, std::string_view v, std::size_t l) {
             p.scenario.stimulus.snr_db = to_optional_double(v, l, "none");
         }},
        {"stimulus.seed",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.stimulus.seed = to_unsigned(v, l); }},
        {"divider.ratio_int",
         [](ParseTarget& p, std::string_view v, std::size_t l) {
             const auto n = to_unsigned(v, l);
             if(n > 1'000'000) throw ConfigError("divider.ratio_int is unreasonably large", l);
             p.scenario.synth.divider.ratio_int = static_cast<int>(n);
         }},
        {"divider.ratio_frac",
         [](ParseTarget& p, std::string_view v, std::size_t l) {
             try {
                 p.scenario.synth.divider.ratio_frac = Rational::parse(v);
             } catch(const std::invalid_argument& e) {
                 throw ConfigError(e.what(), l);
             }
             const auto& f = p.scenario.synth.divider.ratio_frac;
             if(f.num() < 0 || f >= Rational(1, 1))
                 throw ConfigError("divider.ratio_frac must satisfy 0 <= F < 1, got " + f.to_string(), l);
         }},
        {"divider.edge",
         [](ParseTarget& p, std::string_view v, std::size_t l) {
             p.scenario.synth.divider.edge = to_enum<Edge>(v, l, {{"positive", Edge::positive}, {"negative", Edge::negative}});
         }},
        {"adaptation.enabled",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.synth.adaptation.enabled = to_bool(v, l); }},
        {"adaptation.gain_rule",
         [](ParseTarget& p, std::string_view v, std::size_t l) {
             p.scenario.synth.adaptation.gain_rule =
                 to_enum<GainRule>(v, l, {{"beta", GainRule::beta}, {"beta_plus_one", GainRule::beta_plus_one}});
         }},
        {"adaptation.basis",
         [](ParseTarget& p, std::string_view v, std::size_t l) {
             p.scenario.synth.adaptation.basis = to_enum<AdaptationBasis>(
                 v, l, {{"instantaneous", AdaptationBasis::instantaneous}, {"average", AdaptationBasis::average}});
         }},
        {"fsm.enabled",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.synth.fsm.enabled = to_bool(v, l); }},
        {"fsm.window",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.synth.fsm.window = to_unsigned(v, l); }},
        {"fsm.threshold",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.synth.fsm.threshold = to_double(v, l); }},
        {"run.samples",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.run_length = to_unsigned(v, l); }},
        {"analysis.epsilon",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.analysis.epsilon = to_double(v, l); }},
        {"analysis.hold",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.analysis.hold = to_unsigned(v, l); }},
        {"analysis.jitter_window",
         [](ParseTarget& p, std::string_view v, std::size_t l) {
             p.scenario.analysis.jitter_window = to_enum<JitterWindowPolicy>(
                 v, l,
                 {{"post_lock_half", JitterWindowPolicy::post_lock_half}, {"tail_half", JitterWindowPolicy::tail_half}});
         }},
        {"sweep.snr_min",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.sweep.snr_min = to_double(v, l); }},
        {"sweep.snr_max",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.sweep.snr_max = to_double(v, l); }},
        {"sweep.snr_step",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.sweep.snr_step = to_double(v, l); }},
        {"sweep.snr_list",
         [](ParseTarget& p, std::string_view v, std::size_t l) {
             p.scenario.sweep.snr_list.clear();
             while(!v.empty()) {
                 const auto comma = v.find(',');
                 p.scenario.sweep.snr_list.push_back(to_double(trim(v.substr(0, comma)), l));
                 v = comma == std::string_view::npos ? std::string_view{} : v.substr(comma + 1);
             }
         }},
        {"sweep.trials",
         [](ParseTarget& p, std::string_view v, std::size_t l) { p.scenario.sweep.trials = to_unsigned(v, l); }},
    };
    return table;
}

} // namespace

void Scenario::validate() const {
    try {
        synth.validate();
        stimulus.validate();
        if(!(synth.divider.beta_avg() >= 1.0)) throw std::invalid_argument("divider: average ratio must be >= 1");
    } catch(const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if(!(analysis.epsilon > 0.0)) throw ConfigError("analysis.epsilon must be > 0");
    if(analysis.hold < 1) throw ConfigError("analysis.hold must be >= 1");
    if(run_length < analysis.hold) throw ConfigError("run.samples must be >= analysis.hold");
    if(sweep.trials < 1) throw ConfigError("sweep.trials must be >= 1");
    const auto grid = sweep.grid();
    if(grid.empty()) throw ConfigError("sweep grid is empty");
    for(std::size_t i = 1; i < grid.size(); ++i)
        if(!(grid[i] > grid[i - 1])) throw ConfigError("sweep SNR grid must be strictly increasing");
}

Scenario parse_scenario(std::string_view text) {
    ParseTarget target;
    std::map<std::string, std::size_t, std::less<>> seen;
    std::size_t line_no = 0;
    while(!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if(const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if(line.empty()) continue;

        const auto eq = line.find('=');
        if(eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if(key.empty()) throw ConfigError("missing key before '='", line_no);
        if(value.empty()) throw ConfigError("missing value for '" + std::string(key) + "'", line_no);

        const auto it = setters().find(key);
        if(it == setters().end()) throw ConfigError("unknown key '" + std::string(key) + "'", line_no);
        if(const auto dup = seen.find(key); dup != seen.end())
            throw ConfigError("duplicate key '" + std::string(key) + "' (first on line " +
                                  std::to_string(dup->second) + ")",
                              line_no);
        seen.emplace(std::string(key), line_no);
        it->second(target, value, line_no);
    }

    Scenario scenario = std::move(target.scenario);
    scenario.stimulus.base_frequency =
        target.base_frequency.value_or(scenario.synth.loop.free_running_frequency());
    scenario.validate();
    return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if(!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::string to_scenario_text(const Scenario& s) {
    const auto& loop = s.synth.loop;
    const auto& st = s.stimulus;
    std::ostringstream out;
    const auto line = [&](std::string_view key, std::string_view value) { out << key << " = " << value << '\n'; };
    const auto num = [&](std::string_view key, double value) { line(key, format_double(value)); };

    line("name", s.name);
    line("loop.variant", to_string(loop.variant));
    line("loop.dco_law", to_string(loop.dco_law));
    num("loop.dco_sensitivity", loop.dco_sensitivity);
    num("loop.dco_dc_constant", loop.dco_dc_constant);
    num("loop.filter_gain", loop.filter_gain);
    num("loop.tdtl_delay", loop.delay());
    num("loop.f_floor", loop.floor_frequency());
    num("loop.f_ceil", loop.ceil_frequency());
    num("stimulus.base_frequency", st.base_frequency);
    num("stimulus.step_value", st.step_value);
    num("stimulus.step_scale", st.kappa());
    num("stimulus.step_time", st.step_time);
    num("stimulus.amplitude", st.amplitude);
    num("stimulus.initial_phase", st.initial_phase);
    line("stimulus.snr_db", st.snr_db ? format_double(*st.snr_db) : "none");
    line("stimulus.seed", std::to_string(st.seed));
    line("divider.ratio_int", std::to_string(s.synth.divider.ratio_int));
    line("divider.ratio_frac", s.synth.divider.ratio_frac.to_string());
    line("divider.edge", to_string(s.synth.divider.edge));
    line("adaptation.enabled", s.synth.adaptation.enabled ? "true" : "false");
    line("adaptation.gain_rule", to_string(s.synth.adaptation.gain_rule));
    line("adaptation.basis", to_string(s.synth.adaptation.basis));
    line("fsm.enabled", s.synth.fsm.enabled ? "true" : "false");
    line("fsm.window", std::to_string(s.synth.fsm.window));
    num("fsm.threshold", s.synth.fsm.threshold);
    line("run.samples", std::to_string(s.run_length));
    num("analysis.epsilon", s.analysis.epsilon);
    line("analysis.hold", std::to_string(s.analysis.hold));
    line("analysis.jitter_window", to_string(s.analysis.jitter_window));
    num("sweep.snr_min", s.sweep.snr_min);
    num("sweep.snr_max", s.sweep.snr_max);
    num("sweep.snr_step", s.sweep.snr_step);
    if(!s.sweep.snr_list.empty()) {
        std::string list;
        for(double v : s.sweep.snr_list) list += (list.empty() ? "" : ", ") + format_double(v);
        line("sweep.snr_list", list);
    }
    line("sweep.trials", std::to_string(s.sweep.trials));
    return out.str();
}

nlohmann::ordered_json to_json(const Scenario& s) {
    const auto& loop = s.synth.loop;
    const auto& st = s.stimulus;
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["loop"] = {{"variant", to_string(loop.variant)},
                 {"dco_law", to_string(loop.dco_law)},
                 {"dco_sensitivity", loop.dco_sensitivity},
                 {"dco_dc_constant", loop.dco_dc_constant},
                 {"filter_gain", loop.filter_gain},
                 {"tdtl_delay", loop.delay()},
                 {"f_floor", loop.floor_frequency()},
                 {"f_ceil", loop.ceil_frequency()}};
    j["stimulus"] = {{"base_frequency", st.base_frequency},
                     {"step_value", st.step_value},
                     {"step_scale", st.kappa()},
                     {"step_time", st.step_time},
                     {"amplitude", st.amplitude},
                     {"initial_phase", st.initial_phase},
                     {"snr_db", st.snr_db ? nlohmann::ordered_json(*st.snr_db) : nlohmann::ordered_json(nullptr)},
                     {"seed", st.seed}};
    j["divider"] = {{"ratio_int", s.synth.divider.ratio_int},
                    {"ratio_frac", s.synth.divider.ratio_frac.to_string()},
                    {"edge", to_string(s.synth.divider.edge)}};
    j["adaptation"] = {{"enabled", s.synth.adaptation.enabled},
                       {"gain_rule", to_string(s.synth.adaptation.gain_rule)},
                       {"basis", to_string(s.synth.adaptation.basis)}};
    j["fsm"] = {{"enabled", s.synth.fsm.enabled}, {"window", s.synth.fsm.window}, {"threshold", s.synth.fsm.threshold}};
    j["run"] = {{"samples", s.run_length}};
    j["analysis"] = {{"epsilon", s.analysis.epsilon},
                     {"hold", s.analysis.hold},
                     {"jitter_window", to_string(s.analysis.jitter_window)}};
    nlohmann::ordered_json grid = nlohmann::ordered_json::array();
    for(double v : s.sweep.grid()) grid.push_back(std::isinf(v) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(v));
    j["sweep"] = {{"snr_grid", grid}, {"trials", s.sweep.trials}};
    return j;
}

} // namespace tanlock

#include "nfq/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nfq/errors.hpp"

namespace nfq::io {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

double parse_double(const std::string& s, const std::string& where) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ParseError(where + ": bad number '" + s + "'");
    return v;
}

long parse_long(const std::string& s, const std::string& where) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0')
        throw ParseError(where + ": bad integer '" + s + "'");
    return v;
}

StateKind parse_kind(const std::string& s, const std::string& where) {
    if (s == "Regular") return StateKind::Regular;
    if (s == "Goal") return StateKind::Goal;
    if (s == "Forbidden") return StateKind::Forbidden;
    throw ParseError(where + ": unknown kind '" + s + "'");
}

Action parse_action(long code, const std::string& where) {
    if (code == -1) return Action::Left;
    if (code == 1) return Action::Right;
    throw ParseError(where + ": action code must be -1 or +1");
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

void expect_format(std::ifstream& in, const std::string& tag,
                   const std::string& path) {
    std::string line;
    if (!std::getline(in, line) || line != "# format: " + tag)
        throw ParseError(path + ": expected format tag '" + tag + "'");
}

void write_array(std::ofstream& out, const std::string& name,
                 const std::vector<double>& v) {
    out << name;
    for (double x : v) out << ' ' << format_double(x);
    out << '\n';
}

std::vector<double> read_array(std::ifstream& in, const std::string& name,
                               std::size_t count, const std::string& path) {
    std::string tag;
    if (!(in >> tag) || tag != name)
        throw ParseError(path + ": expected section '" + name + "'");
    std::vector<double> v(count);
    for (double& x : v)
        if (!(in >> x)) throw ParseError(path + ": truncated section '" + name + "'");
    return v;
}

} // namespace

void save_checkpoint(const std::string& path, const NetworkParams& net,
                     const RpropState& opt, std::uint64_t seed) {
    std::ofstream out = open_out(path);
    out << "# format: nfq-checkpoint v1\n";
    out << "seed " << seed << '\n';
    out << "layers";
    for (int s : net.sizes) out << ' ' << s;
    out << '\n';
    out << "rprop " << format_double(opt.hp.eta_plus) << ' '
        << format_double(opt.hp.eta_minus) << ' '
        << format_double(opt.hp.delta0) << ' '
        << format_double(opt.hp.delta_min) << ' '
        << format_double(opt.hp.delta_max) << '\n';
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const std::string n = std::to_string(l);
        write_array(out, "w" + n, net.weights[l]);
        write_array(out, "b" + n, net.biases[l]);
        write_array(out, "dw" + n, opt.step.weights[l]);
        write_array(out, "db" + n, opt.step.biases[l]);
        write_array(out, "gw" + n, opt.prev_grad.weights[l]);
        write_array(out, "gb" + n, opt.prev_grad.biases[l]);
    }
    if (!out) throw IoError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in = open_in(path);
    expect_format(in, "nfq-checkpoint v1", path);

    Checkpoint cp;
    std::string tag;
    if (!(in >> tag) || tag != "seed" || !(in >> cp.seed))
        throw ParseError(path + ": missing seed");
    if (!(in >> tag) || tag != "layers")
        throw ParseError(path + ": missing layers");
    std::string rest;
    std::getline(in, rest);
    std::istringstream ls(rest);
    int width = 0;
    std::vector<int> sizes;
    while (ls >> width) sizes.push_back(width);
    if (sizes.size() < 2) throw ParseError(path + ": bad layer list");

    RpropHyper hp;
    if (!(in >> tag) || tag != "rprop" || !(in >> hp.eta_plus >> hp.eta_minus >>
                                            hp.delta0 >> hp.delta_min >>
                                            hp.delta_max))
        throw ParseError(path + ": missing rprop hyperparameters");

    cp.net.sizes = sizes;
    cp.opt.hp = hp;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const auto nw = static_cast<std::size_t>(sizes[l]) *
                        static_cast<std::size_t>(sizes[l + 1]);
        const auto nb = static_cast<std::size_t>(sizes[l + 1]);
        const std::string n = std::to_string(l);
        cp.net.weights.push_back(read_array(in, "w" + n, nw, path));
        cp.net.biases.push_back(read_array(in, "b" + n, nb, path));
        cp.opt.step.weights.push_back(read_array(in, "dw" + n, nw, path));
        cp.opt.step.biases.push_back(read_array(in, "db" + n, nb, path));
        cp.opt.prev_grad.weights.push_back(read_array(in, "gw" + n, nw, path));
        cp.opt.prev_grad.biases.push_back(read_array(in, "gb" + n, nb, path));
    }
    return cp;
}

namespace {

constexpr const char* kLogHeader =
    "episode,t,pos,vel,volt,action_code,cost,next_pos,next_vel,next_volt,kind";

void check_finite_state(const State& s, const std::string& where) {
    if (!std::isfinite(s.position) || !std::isfinite(s.velocity) ||
        !std::isfinite(s.voltage))
        throw ParseError(where + ": non-finite state component");
}

} // namespace

void write_transition_log(const std::string& path,
                          const std::vector<LogRow>& rows) {
    std::ofstream out = open_out(path);
    out << "# format: nfq-transitions v1\n" << kLogHeader << '\n';
    for (const LogRow& r : rows) {
        out << r.episode << ',' << r.t << ',' << format_double(r.tr.s.position)
            << ',' << format_double(r.tr.s.velocity) << ','
            << format_double(r.tr.s.voltage) << ',' << action_code(r.tr.a)
            << ',' << format_double(r.tr.cost) << ','
            << format_double(r.tr.s_next.position) << ','
            << format_double(r.tr.s_next.velocity) << ','
            << format_double(r.tr.s_next.voltage) << ',' << kind_name(r.tr.kind)
            << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<LogRow> read_transition_log(const std::string& path) {
    std::ifstream in = open_in(path);
    expect_format(in, "nfq-transitions v1", path);

    std::string line;
    int lineno = 1;
    if (!std::getline(in, line) || line != kLogHeader)
        throw ParseError(path + ":2: bad column header");
    ++lineno;

    std::vector<LogRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto f = split_csv(line);
        if (f.size() != 11) throw ParseError(where + ": expected 11 fields");
        LogRow r;
        r.episode = static_cast<int>(parse_long(f[0], where));
        r.t = static_cast<int>(parse_long(f[1], where));
        r.tr.s = {parse_double(f[2], where), parse_double(f[3], where),
                  parse_double(f[4], where)};
        r.tr.a = parse_action(parse_long(f[5], where), where);
        r.tr.cost = parse_double(f[6], where);
        r.tr.s_next = {parse_double(f[7], where), parse_double(f[8], where),
                       parse_double(f[9], where)};
        r.tr.kind = parse_kind(f[10], where);
        check_finite_state(r.tr.s, where);
        check_finite_state(r.tr.s_next, where);
        if (!std::isfinite(r.tr.cost))
            throw ParseError(where + ": non-finite cost");
        rows.push_back(r);
    }
    return rows;
}

std::vector<Transition> transitions_of(const std::vector<LogRow>& rows) {
    std::vector<Transition> out;
    out.reserve(rows.size());
    for (const LogRow& r : rows) out.push_back(r.tr);
    return out;
}

namespace {
constexpr const char* kMetricsHeader =
    "episode,steps,total_cost,success,terminated,reset";
}

void write_metrics(const std::string& path,
                   const std::vector<EpisodeMetrics>& rows) {
    std::ofstream out = open_out(path);
    out << "# format: nfq-metrics v1\n" << kMetricsHeader << '\n';
    for (const EpisodeMetrics& m : rows) {
        out << m.episode << ',' << m.steps << ',' << format_double(m.total_cost)
            << ',' << (m.success ? 1 : 0) << ',' << (m.terminated ? 1 : 0)
            << ',' << (m.reset_occurred ? 1 : 0) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<EpisodeMetrics> read_metrics(const std::string& path) {
    std::ifstream in = open_in(path);
    expect_format(in, "nfq-metrics v1", path);

    std::string line;
    int lineno = 1;
    if (!std::getline(in, line) || line != kMetricsHeader)
        throw ParseError(path + ":2: bad column header");
    ++lineno;

    std::vector<EpisodeMetrics> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto f = split_csv(line);
        if (f.size() != 6) throw ParseError(where + ": expected 6 fields");
        EpisodeMetrics m;
        m.episode = static_cast<int>(parse_long(f[0], where));
        m.steps = static_cast<int>(parse_long(f[1], where));
        m.total_cost = parse_double(f[2], where);
        m.success = parse_long(f[3], where) != 0;
        m.terminated = parse_long(f[4], where) != 0;
        m.reset_occurred = parse_long(f[5], where) != 0;
        rows.push_back(m);
    }
    return rows;
}

namespace {
constexpr const char* kTrajHeader =
    "episode,t,position,velocity,voltage,action_code,cost,kind";
}

void write_trajectories(const std::string& path,
                        const std::vector<TrajRow>& rows) {
    std::ofstream out = open_out(path);
    out << "# format: nfq-trajectories v1\n" << kTrajHeader << '\n';
    for (const TrajRow& r : rows) {
        out << r.episode << ',' << r.t << ',' << format_double(r.position)
            << ',' << format_double(r.velocity) << ','
            << format_double(r.voltage) << ',' << r.action << ','
            << format_double(r.cost) << ',' << kind_name(r.kind) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<TrajRow> read_trajectories(const std::string& path) {
    std::ifstream in = open_in(path);
    expect_format(in, "nfq-trajectories v1", path);

    std::string line;
    int lineno = 1;
    if (!std::getline(in, line) || line != kTrajHeader)
        throw ParseError(path + ":2: bad column header");
    ++lineno;

    std::vector<TrajRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto f = split_csv(line);
        if (f.size() != 8) throw ParseError(where + ": expected 8 fields");
        TrajRow r;
        r.episode = static_cast<int>(parse_long(f[0], where));
        r.t = static_cast<int>(parse_long(f[1], where));
        r.position = parse_double(f[2], where);
        r.velocity = parse_double(f[3], where);
        r.voltage = parse_double(f[4], where);
        r.action = static_cast<int>(parse_long(f[5], where));
        r.cost = parse_double(f[6], where);
        r.kind = parse_kind(f[7], where);
        rows.push_back(r);
    }
    return rows;
}

} // namespace nfq::io

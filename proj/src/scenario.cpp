#include "polsr/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace polsr {

using nlohmann::json;

namespace {

json geo_json(const geo::GeoPosition& p)
{
    return json{{"lat", p.lat}, {"lon", p.lon}, {"alt", p.alt}};
}

geo::GeoPosition geo_from(const json& j)
{
    return {j.at("lat").get<double>(), j.at("lon").get<double>(), j.value("alt", 0.0)};
}

std::string join(const std::vector<std::string>& v)
{
    std::string out;
    for (const auto& s : v) {
        out += (out.empty() ? "" : "; ") + s;
    }
    return out;
}

json trajectory_json(const NodeSpec& n)
{
    using namespace mobility;
    const auto& spec = n.trajectory.spec();
    if (const auto* f = std::get_if<Fixed>(&spec)) {
        return {{"kind", "fixed"}, {"position", geo_json(f->position)}};
    }
    if (const auto* c = std::get_if<Circular>(&spec)) {
        json j{{"kind", "circular"}, {"center", geo_json(c->center)}, {"radius", c->radius},
               {"speed", c->speed}};
        j["phase"] = n.random_phase ? json("random") : json(c->phase);
        return j;
    }
    if (const auto* s = std::get_if<Shuttle>(&spec)) {
        return {{"kind", "shuttle"}, {"start", geo_json(s->start)}, {"bearing_deg", s->bearing_deg},
                {"leg", s->leg}, {"speed", s->speed}};
    }
    if (const auto* s = std::get_if<LawnmowerScan>(&spec)) {
        return {{"kind", "scan"}, {"corner", geo_json(s->corner)}, {"width", s->width},
                {"height", s->height}, {"lanes", s->lanes}, {"speed", s->speed}};
    }
    const auto& l = std::get<LogReplay>(spec);
    json j{{"kind", "log"}, {"origin", geo_json(l.origin)}};
    json samples = json::array();
    for (std::size_t i = 0; i < l.times.size(); ++i) {
        const auto p = geo::from_local(l.origin, l.points[i]);
        samples.push_back(json::array({l.times[i], p.lat, p.lon, p.alt}));
    }
    j["samples"] = std::move(samples);
    return j;
}

NodeSpec node_from(const json& j, const std::filesystem::path& base_dir)
{
    using namespace mobility;
    NodeSpec n;
    n.id = j.at("id").get<int>();
    n.address = j.contains("address") ? parse_address(j.at("address").get<std::string>())
                                      : default_address(n.id);
    n.role = j.value("role", std::string("relay"));
    const json& t = j.at("trajectory");
    const auto kind = t.at("kind").get<std::string>();
    if (kind == "fixed") {
        n.trajectory = Trajectory(Fixed{geo_from(t.at("position"))});
    } else if (kind == "circular") {
        Circular c{geo_from(t.at("center")), t.value("radius", 30.0), t.value("speed", 12.0), 0.0};
        if (t.contains("phase") && t.at("phase").is_string()) {
            if (t.at("phase").get<std::string>() != "random") {
                throw std::invalid_argument("phase must be a number or \"random\"");
            }
            n.random_phase = true;
        } else {
            c.phase = t.value("phase", 0.0);
        }
        n.trajectory = Trajectory(c);
    } else if (kind == "shuttle") {
        n.trajectory = Trajectory(Shuttle{geo_from(t.at("start")), t.value("bearing_deg", 270.0),
                                          t.at("leg").get<double>(), t.value("speed", 12.0)});
    } else if (kind == "scan") {
        n.trajectory = Trajectory(LawnmowerScan{geo_from(t.at("corner")), t.at("width").get<double>(),
                                                t.at("height").get<double>(), t.at("lanes").get<int>(),
                                                t.value("speed", 12.0)});
    } else if (kind == "log") {
        if (t.contains("path")) {
            auto path = std::filesystem::path(t.at("path").get<std::string>());
            if (path.is_relative() && !base_dir.empty()) {
                path = base_dir / path;
            }
            std::optional<int> which;
            if (t.contains("node")) {
                which = t.at("node").get<int>();
            }
            n.trajectory = load_position_log(path, which);
        } else {
            LogReplay l;
            l.origin = geo_from(t.at("origin"));
            for (const auto& s : t.at("samples")) {
                l.times.push_back(s.at(0).get<double>());
                l.points.push_back(geo::to_local(
                    l.origin, {s.at(1).get<double>(), s.at(2).get<double>(), s.at(3).get<double>()}));
            }
            n.trajectory = Trajectory(std::move(l));
        }
    } else {
        throw std::invalid_argument("unknown trajectory kind '" + kind + "'");
    }
    return n;
}

}  // namespace

double Scenario::effective_tc_interval() const
{
    return tc_interval > 0.0 ? tc_interval : 2.0 * params.hello_interval;
}

const NodeSpec& Scenario::node(int id) const
{
    for (const auto& n : nodes) {
        if (n.id == id) {
            return n;
        }
    }
    throw std::out_of_range("no node with id " + std::to_string(id));
}

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : std::runtime_error("invalid scenario: " + join(problems)), problems_(std::move(problems))
{
}

void validate(const Scenario& sc)
{
    std::vector<std::string> problems;
    const auto check = [&problems](bool ok, const std::string& msg) {
        if (!ok) {
            problems.push_back(msg);
        }
    };
    try {
        sc.params.validate();
    } catch (const std::invalid_argument& e) {
        problems.push_back(std::string("params: ") + e.what());
    }
    try {
        sc.channel.validate();
    } catch (const std::invalid_argument& e) {
        problems.push_back(std::string("channel: ") + e.what());
    }
    check(sc.tc_interval >= 0.0, "tc_interval: must be non-negative (0 selects 2 * hello_interval)");
    check(sc.tc_validity_multiple > 0.0, "tc_validity_multiple: must be positive");
    check(sc.neighbor_hold_multiple > 1.5, "neighbor_hold_multiple: must exceed 1.5");
    check(sc.duration > 0.0 && std::isfinite(sc.duration), "duration: must be positive");
    check(sc.warmup >= 0.0, "warmup: must be non-negative");
    check(sc.repetitions >= 1, "repetitions: must be at least 1");
    check(!sc.gps.enabled || (sc.gps.tau > 0.0 && sc.gps.sigma_h >= 0.0 && sc.gps.sigma_v >= 0.0),
          "gps: needs tau > 0 and non-negative sigmas");

    const auto& tr = sc.traffic;
    check(tr.source != tr.destination, "traffic: source and destination must differ");
    check(tr.datagrams_per_second > 0.0, "traffic.datagrams_per_second: must be positive");
    check(tr.datagram_bytes > 0, "traffic.datagram_bytes: must be positive");
    check(tr.delay_loss_threshold > 0.0, "traffic.delay_loss_threshold: must be positive");
    const double offered = tr.datagrams_per_second * tr.datagram_bytes * 8.0;
    check(std::abs(offered - 1e6) <= 0.05e6,
          "traffic: offered load must be about 1 Mbit/s (got " + std::to_string(offered) + ")");

    check(sc.nodes.size() >= 2, "nodes: need at least two nodes");
    std::set<int> ids;
    std::set<wire::Address> addrs;
    for (const auto& n : sc.nodes) {
        check(ids.insert(n.id).second, "nodes: duplicate id " + std::to_string(n.id));
        check(addrs.insert(n.address).second, "nodes: duplicate address for id " + std::to_string(n.id));
    }
    check(ids.count(tr.source) == 1, "traffic.source: no such node");
    check(ids.count(tr.destination) == 1, "traffic.destination: no such node");
    if (!problems.empty()) {
        throw ScenarioError(std::move(problems));
    }
}

wire::Address default_address(int id)
{
    return (10u << 24) | static_cast<wire::Address>(id & 0xffffff);
}

std::string format_address(wire::Address a)
{
    return std::to_string(a >> 24) + "." + std::to_string((a >> 16) & 0xff) + "." +
           std::to_string((a >> 8) & 0xff) + "." + std::to_string(a & 0xff);
}

wire::Address parse_address(const std::string& s)
{
    unsigned a = 0, b = 0, c = 0, d = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%u.%u.%u.%u%c", &a, &b, &c, &d, &tail) != 4 || a > 255 || b > 255 ||
        c > 255 || d > 255) {
        throw std::invalid_argument("bad address '" + s + "'");
    }
    return (a << 24) | (b << 16) | (c << 8) | d;
}

std::string to_json_string(const Scenario& sc, int indent)
{
    const auto& cm = sc.channel;
    json j;
    j["schema"] = kScenarioSchema;
    j["name"] = sc.name;
    j["protocol"] = to_string(sc.protocol);
    j["params"] = {{"alpha", sc.params.alpha}, {"beta", sc.params.beta}, {"gamma", sc.params.gamma},
                   {"hello_interval", sc.params.hello_interval}};
    j["tc_interval"] = sc.effective_tc_interval();
    j["tc_validity_multiple"] = sc.tc_validity_multiple;
    j["neighbor_hold_multiple"] = sc.neighbor_hold_multiple;
    j["channel"] = {{"kind", channel::to_string(cm.kind)},
                    {"p1", cm.p1},
                    {"p2", cm.p2},
                    {"breakpoint", cm.breakpoint},
                    {"exponent_near", cm.exponent_near},
                    {"exponent_far", cm.exponent_far},
                    {"reference_loss_db", cm.reference_loss_db},
                    {"tx_power_dbm", cm.tx_power_dbm},
                    {"noise_floor_dbm", cm.noise_floor_dbm},
                    {"per_slope", cm.per_slope},
                    {"per_threshold_db", cm.per_threshold_db},
                    {"shadowing_db", cm.shadowing_db},
                    {"per_reference_bytes", cm.per_reference_bytes},
                    {"retry_limit", cm.retry_limit},
                    {"slot_time", cm.slot_time},
                    {"rate", cm.rate}};
    j["gps"] = {{"enabled", sc.gps.enabled}, {"tau", sc.gps.tau}, {"sigma_h", sc.gps.sigma_h},
                {"sigma_v", sc.gps.sigma_v}};
    j["traffic"] = {{"source", sc.traffic.source},
                    {"destination", sc.traffic.destination},
                    {"datagrams_per_second", sc.traffic.datagrams_per_second},
                    {"datagram_bytes", sc.traffic.datagram_bytes},
                    {"delay_loss_threshold", sc.traffic.delay_loss_threshold}};
    j["duration"] = sc.duration;
    j["warmup"] = sc.warmup;
    j["repetitions"] = sc.repetitions;
    j["seed"] = sc.seed;
    json nodes = json::array();
    for (const auto& n : sc.nodes) {
        nodes.push_back({{"id", n.id},
                         {"address", format_address(n.address)},
                         {"role", n.role},
                         {"trajectory", trajectory_json(n)}});
    }
    j["nodes"] = std::move(nodes);
    return j.dump(indent);
}

Scenario scenario_from_json_string(const std::string& text, const std::filesystem::path& base_dir)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError({std::string("syntax: ") + e.what()});
    }
    Scenario sc;
    std::vector<std::string> problems;
    const auto section = [&problems](const char* name, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            problems.push_back(std::string(name) + ": " + e.what());
        }
    };
    section("schema", [&] {
        const int schema = j.value("schema", kScenarioSchema);
        if (schema != kScenarioSchema) {
            throw std::invalid_argument("unsupported schema version " + std::to_string(schema));
        }
    });
    section("name", [&] { sc.name = j.value("name", sc.name); });
    section("protocol", [&] {
        if (j.contains("protocol")) {
            sc.protocol = protocol_from_string(j.at("protocol").get<std::string>());
        }
    });
    section("params", [&] {
        if (!j.contains("params")) {
            return;
        }
        const auto& p = j.at("params");
        sc.params.alpha = p.value("alpha", sc.params.alpha);
        sc.params.beta = p.value("beta", sc.params.beta);
        sc.params.gamma = p.value("gamma", sc.params.gamma);
        sc.params.hello_interval = p.value("hello_interval", sc.params.hello_interval);
    });
    section("timing", [&] {
        sc.tc_interval = j.value("tc_interval", sc.tc_interval);
        sc.tc_validity_multiple = j.value("tc_validity_multiple", sc.tc_validity_multiple);
        sc.neighbor_hold_multiple = j.value("neighbor_hold_multiple", sc.neighbor_hold_multiple);
    });
    section("channel", [&] {
        if (!j.contains("channel")) {
            return;
        }
        const auto& c = j.at("channel");
        auto& cm = sc.channel;
        if (c.contains("kind")) {
            cm.kind = channel::kind_from_string(c.at("kind").get<std::string>());
        }
        cm.p1 = c.value("p1", cm.p1);
        cm.p2 = c.value("p2", cm.p2);
        cm.breakpoint = c.value("breakpoint", cm.breakpoint);
        cm.exponent_near = c.value("exponent_near", cm.exponent_near);
        cm.exponent_far = c.value("exponent_far", cm.exponent_far);
        cm.reference_loss_db = c.value("reference_loss_db", cm.reference_loss_db);
        cm.tx_power_dbm = c.value("tx_power_dbm", cm.tx_power_dbm);
        cm.noise_floor_dbm = c.value("noise_floor_dbm", cm.noise_floor_dbm);
        cm.per_slope = c.value("per_slope", cm.per_slope);
        cm.per_threshold_db = c.value("per_threshold_db", cm.per_threshold_db);
        cm.shadowing_db = c.value("shadowing_db", cm.shadowing_db);
        cm.per_reference_bytes = c.value("per_reference_bytes", cm.per_reference_bytes);
        cm.retry_limit = c.value("retry_limit", cm.retry_limit);
        cm.slot_time = c.value("slot_time", cm.slot_time);
        cm.rate = c.value("rate", cm.rate);
    });
    section("gps", [&] {
        if (!j.contains("gps")) {
            return;
        }
        const auto& g = j.at("gps");
        sc.gps.enabled = g.value("enabled", true);
        sc.gps.tau = g.value("tau", sc.gps.tau);
        sc.gps.sigma_h = g.value("sigma_h", sc.gps.sigma_h);
        sc.gps.sigma_v = g.value("sigma_v", sc.gps.sigma_v);
    });
    section("traffic", [&] {
        const auto& t = j.at("traffic");
        sc.traffic.source = t.at("source").get<int>();
        sc.traffic.destination = t.at("destination").get<int>();
        sc.traffic.datagrams_per_second = t.value("datagrams_per_second", sc.traffic.datagrams_per_second);
        sc.traffic.datagram_bytes = t.value("datagram_bytes", sc.traffic.datagram_bytes);
        sc.traffic.delay_loss_threshold = t.value("delay_loss_threshold", sc.traffic.delay_loss_threshold);
    });
    section("run", [&] {
        sc.duration = j.value("duration", sc.duration);
        sc.warmup = j.value("warmup", sc.warmup);
        sc.repetitions = j.value("repetitions", sc.repetitions);
        sc.seed = j.value("seed", sc.seed);
    });
    section("nodes", [&] {
        const auto& nodes = j.at("nodes");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            try {
                sc.nodes.push_back(node_from(nodes.at(i), base_dir));
            } catch (const std::exception& e) {
                problems.push_back("nodes[" + std::to_string(i) + "]: " + e.what());
            }
        }
    });
    if (!problems.empty()) {
        throw ScenarioError(std::move(problems));
    }
    validate(sc);
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open scenario file " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_json_string(ss.str(), path.parent_path());
}

std::uint64_t scenario_hash(const Scenario& sc)
{
    const std::string canonical = to_json_string(sc, -1);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace polsr

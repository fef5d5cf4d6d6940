#ifndef POLSR_SCENARIO_HPP
#define POLSR_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "polsr/channel.hpp"
#include "polsr/linkmetrics.hpp"
#include "polsr/mobility.hpp"
#include "polsr/wire.hpp"

namespace polsr {

inline constexpr int kScenarioSchema = 1;

struct NodeSpec {
    int id = 0;
    wire::Address address = 0;
    std::string role = "relay";
    mobility::Trajectory trajectory;
    bool random_phase = false;  // Circular only: phase drawn per seed in [0, 2pi)
};

struct TrafficSpec {
    int source = 0;
    int destination = 0;
    double datagrams_per_second = 85.0;
    int datagram_bytes = 1470;
    double delay_loss_threshold = 5.0;  // s
};

struct GpsConfig {
    bool enabled = false;
    double tau = 30.0;
    double sigma_h = 3.0;
    double sigma_v = 5.0;
};

struct Scenario {
    std::string name = "custom";
    Protocol protocol = Protocol::Olsr;
    lq::LqParams params;
    double tc_interval = 0.0;  // 0 means 2 * hello_interval
    double tc_validity_multiple = 3.0;
    double neighbor_hold_multiple = 3.0;
    channel::ChannelModel channel;
    GpsConfig gps;
    TrafficSpec traffic;
    double duration = 100.0;  // measured seconds
    double warmup = 10.0;     // protocol runs this long before traffic starts
    int repetitions = 10;
    std::uint64_t seed = 1;
    std::vector<NodeSpec> nodes;

    double effective_tc_interval() const;
    double tc_validity() const { return tc_validity_multiple * effective_tc_interval(); }
    double neighbor_hold() const { return neighbor_hold_multiple * params.hello_interval; }

    const NodeSpec& node(int id) const;
};

/// Validation failure carrying one message per offending field.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Throws ScenarioError listing every violated invariant.
void validate(const Scenario& sc);

/// Default dotted-quad style address 10.0.0.<id>.
wire::Address default_address(int id);
std::string format_address(wire::Address a);
wire::Address parse_address(const std::string& s);

std::string to_json_string(const Scenario& sc, int indent = 2);
Scenario scenario_from_json_string(const std::string& text,
                                   const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// FNV-1a over the canonical (compact, sorted-key) JSON form.
std::uint64_t scenario_hash(const Scenario& sc);
std::string hash_hex(std::uint64_t h);

}  // namespace polsr

#endif  // POLSR_SCENARIO_HPP

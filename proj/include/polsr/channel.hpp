#ifndef POLSR_CHANNEL_HPP
#define POLSR_CHANNEL_HPP

#include <string>

#include "polsr/rng.hpp"

namespace polsr::channel {

enum class Kind { LogisticDlr, TwoSlope };

const char* to_string(Kind k);
Kind kind_from_string(const std::string& s);

/// Distance-driven frame delivery. LogisticDlr is the measured end-to-end
/// datagram loss law, applied once per hop with MAC retries already folded
/// in. TwoSlope derives a per-attempt error rate from a dual-slope pathloss
/// with log-normal shadowing, and unicast frames get retry_limit attempts.
struct ChannelModel {
    Kind kind = Kind::LogisticDlr;

    // LogisticDlr: loss(d) = 1 / (1 + exp(p1 - p2 d))
    double p1 = 8.9;
    double p2 = 0.025;

    // TwoSlope
    double breakpoint = 10.0;       // m
    double exponent_near = 2.0;
    double exponent_far = 3.5;
    double reference_loss_db = 40.0;  // at 1 m
    double tx_power_dbm = 20.0;
    double noise_floor_dbm = -95.0;
    double per_slope = 1.5;         // 1/dB
    double per_threshold_db = 3.0;  // SNR where PER = 0.5
    double shadowing_db = 3.0;
    int per_reference_bytes = 0;  // > 0: PER curve holds for this frame size and scales with length

    int retry_limit = 7;
    double slot_time = 0.002;  // s per attempt
    double rate = 13e6;        // bit/s

    void validate() const;
};

enum class Mode { Unicast, Broadcast };

double pathloss_db(const ChannelModel& cm, double d);

/// Error probability of one transmission attempt at distance d, with the
/// given shadowing offset (dB) added to the pathloss. frame_bytes only
/// matters when the model scales PER with frame length.
double attempt_loss_prob(const ChannelModel& cm, double d, double shadow_db = 0.0,
                         int frame_bytes = 0);

/// Loss probability of a hop after retries (LogisticDlr: the measured law).
double frame_loss_prob(const ChannelModel& cm, double d, double shadow_db = 0.0,
                       int frame_bytes = 0);

struct Delivery {
    bool delivered = false;
    int attempts = 0;
    double latency = 0.0;  // s; attempts * slot_time + serialization
};

/// Samples one hop. Broadcasts get a single attempt.
Delivery attempt_delivery(const ChannelModel& cm, double d, int frame_bytes, Rng& rng,
                          Mode mode = Mode::Unicast);

}  // namespace polsr::channel

#endif  // POLSR_CHANNEL_HPP

#include "polsr/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polsr::channel {

namespace {

double logistic(double x)
{
    return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace

const char* to_string(Kind k)
{
    return k == Kind::TwoSlope ? "two_slope" : "logistic_dlr";
}

Kind kind_from_string(const std::string& s)
{
    if (s == "logistic_dlr" || s == "logistic") {
        return Kind::LogisticDlr;
    }
    if (s == "two_slope") {
        return Kind::TwoSlope;
    }
    throw std::invalid_argument("unknown channel kind '" + s + "'");
}

void ChannelModel::validate() const
{
    if (retry_limit < 1) {
        throw std::invalid_argument("retry_limit must be at least 1");
    }
    if (!(slot_time >= 0.0) || !(rate > 0.0)) {
        throw std::invalid_argument("slot_time must be non-negative and rate positive");
    }
    if (kind == Kind::LogisticDlr && !(p2 >= 0.0)) {
        throw std::invalid_argument("p2 must be non-negative so loss grows with distance");
    }
    if (kind == Kind::TwoSlope) {
        if (!(breakpoint > 0.0) || !(exponent_near > 0.0) || !(exponent_far >= exponent_near)) {
            throw std::invalid_argument("two-slope needs breakpoint > 0 and far >= near exponent");
        }
        if (!(per_slope > 0.0) || !(shadowing_db >= 0.0)) {
            throw std::invalid_argument("two-slope needs per_slope > 0 and shadowing >= 0");
        }
        if (per_reference_bytes < 0) {
            throw std::invalid_argument("per_reference_bytes must be non-negative");
        }
    }
}

double pathloss_db(const ChannelModel& cm, double d)
{
    d = std::max(d, 1.0);
    if (d <= cm.breakpoint) {
        return cm.reference_loss_db + 10.0 * cm.exponent_near * std::log10(d);
    }
    return cm.reference_loss_db + 10.0 * cm.exponent_near * std::log10(cm.breakpoint) +
           10.0 * cm.exponent_far * std::log10(d / cm.breakpoint);
}

double attempt_loss_prob(const ChannelModel& cm, double d, double shadow_db, int frame_bytes)
{
    if (cm.kind == Kind::LogisticDlr) {
        return logistic(cm.p2 * d - cm.p1);
    }
    const double snr = cm.tx_power_dbm - pathloss_db(cm, d) - shadow_db - cm.noise_floor_dbm;
    const double per = logistic(-cm.per_slope * (snr - cm.per_threshold_db));
    if (cm.per_reference_bytes <= 0 || frame_bytes <= 0) {
        return per;
    }
    const double ratio = static_cast<double>(frame_bytes) / cm.per_reference_bytes;
    return -std::expm1(ratio * std::log1p(-per));
}

double frame_loss_prob(const ChannelModel& cm, double d, double shadow_db, int frame_bytes)
{
    const double p = attempt_loss_prob(cm, d, shadow_db, frame_bytes);
    if (cm.kind == Kind::LogisticDlr) {
        return p;
    }
    return std::pow(p, cm.retry_limit);
}

Delivery attempt_delivery(const ChannelModel& cm, double d, int frame_bytes, Rng& rng, Mode mode)
{
    const double serialization = frame_bytes * 8.0 / cm.rate;
    Delivery out;
    if (cm.kind == Kind::LogisticDlr) {
        out.attempts = 1;
        out.delivered = !rng.bernoulli(attempt_loss_prob(cm, d));
    } else {
        const int limit = mode == Mode::Broadcast ? 1 : cm.retry_limit;
        while (out.attempts < limit && !out.delivered) {
            ++out.attempts;
            const double shadow = cm.shadowing_db > 0.0 ? rng.normal(0.0, cm.shadowing_db) : 0.0;
            out.delivered = !rng.bernoulli(attempt_loss_prob(cm, d, shadow, frame_bytes));
        }
    }
    out.latency = out.attempts * cm.slot_time + serialization;
    return out;
}

}  // namespace polsr::channel

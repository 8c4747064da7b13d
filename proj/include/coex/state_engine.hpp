#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "coex/graph.hpp"
#include "coex/topology.hpp"

namespace coex {

/// Integer time on the exact frame grid. A frame is `LtuSchedule::frame_ticks`
/// ticks long; the tick length is chosen so every allotment is a whole number.
using Ticks = std::int64_t;

/// Per-frame phase of an LTE-U node.
enum class LtuPhase : std::uint8_t { Pending = 0, Transmitting = 1, Done = 2 };

struct LtuNodeState {
    LtuPhase phase = LtuPhase::Pending;
    Ticks remaining = 0;  // ON time still owed in this frame

    bool operator==(const LtuNodeState&) const = default;
};

struct NetworkState {
    std::vector<LtuNodeState> nodes;
    Ticks entry_time = 0;
    double probability = 1.0;

    bool stable() const;
    std::vector<LtuPhase> phases() const;
};

struct LtuSchedule {
    Ticks frame_ticks = 1;
    std::vector<Ticks> allotments;  // ON time owed per LTE-U node
    double frame_seconds = 0.04;

    std::size_t size() const { return allotments.size(); }
    double to_seconds(Ticks t) const;
    /// Tick containing `seconds`; values within 1e-9 of a tick boundary snap to it.
    Ticks to_ticks(double seconds) const;
    void validate() const;
};

/// Builds an exact schedule: the frame is split into lcm(denominators) ticks.
/// Throws ResourceError if the common denominator overflows.
LtuSchedule make_schedule(const std::vector<DutyFraction>& duties, double frame_seconds);

/// Schedule for the LTE-U nodes of `graphs`, in LTE-U ordinal order.
LtuSchedule make_schedule(const ContentionGraphs& graphs, double frame_seconds);

/// A maximal interval during which one merged network state persists.
struct Segment {
    std::uint64_t state_id = 0;
    std::vector<LtuPhase> phases;
    Ticks start = 0;
    Ticks end = 0;
    double probability = 0.0;
};

struct EnumerationOptions {
    std::size_t max_segments = 1'000'000;
};

/// Probability-weighted cover of one frame by segments.
struct SegmentCover {
    LtuSchedule schedule;
    std::vector<Segment> segments;  // ordered by start time, then state
    std::vector<std::string> warnings;
    std::vector<std::size_t> truncated_nodes;  // LTE-U ordinals that could not finish
    std::vector<double> expected_on_seconds;   // realised ON time per node
};

NetworkState initial_state(const LtuSchedule& schedule);

/// Pending nodes none of whose LTE-U neighbours is transmitting.
std::vector<std::size_t> eligible_starters(const NetworkState& s, const Graph& ltu_adj);

/// One macro-step: count down to the next completion, complete every node that
/// reaches zero, then start nodes one at a time, each pick uniform among the
/// currently eligible. Identical children are merged. Child `probability`
/// fields carry the parent probability times the branch probability, which is
/// also returned alongside each child.
///
/// Throws UsageError on a stable state.
std::vector<std::pair<NetworkState, double>> expand(const NetworkState& s, const Graph& ltu_adj);

/// Exhaustive enumeration of the frame. Branches that cannot finish by the end
/// of the frame are cut there and reported in `warnings`/`truncated_nodes`.
/// Throws ResourceError when more than `max_segments` segments are produced.
SegmentCover build_segments(const LtuSchedule& schedule, const Graph& ltu_adj,
                            const EnumerationOptions& options = {});

/// Total probability of the network being in `phases` at time `t`.
double state_probability(const SegmentCover& cover, const std::vector<LtuPhase>& phases, Ticks t);
double state_probability(const SegmentCover& cover, const std::vector<LtuPhase>& phases,
                         double t_seconds);

/// (P[pending], P[transmitting], P[done]) for LTE-U node `node` at time `t`.
std::array<double, 3> node_state_probability(const SegmentCover& cover, std::size_t node, Ticks t);
std::array<double, 3> node_state_probability(const SegmentCover& cover, std::size_t node,
                                             double t_seconds);

/// Total probability mass of the segments covering `t`.
double mass_at(const SegmentCover& cover, Ticks t);

/// CSV: state_id,chi,t_start_us,t_end_us,probability
void write_segments_csv(std::ostream& os, const SegmentCover& cover);

std::string phases_to_string(const std::vector<LtuPhase>& phases);

}  // namespace coex

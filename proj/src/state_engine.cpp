#include "coex/state_engine.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "coex/errors.hpp"

namespace coex {

namespace {

using PhaseKey = std::vector<LtuPhase>;

// Merge key for settled states: phase and remaining time of every node.
using StateKey = std::vector<std::int64_t>;

StateKey encode(const NetworkState& s)
{
    StateKey key;
    key.reserve(s.nodes.size() * 2);
    for (const auto& n : s.nodes) {
        key.push_back(static_cast<std::int64_t>(n.phase));
        key.push_back(n.remaining);
    }
    return key;
}

NetworkState decode(const StateKey& key, Ticks t, double p)
{
    NetworkState s;
    s.entry_time = t;
    s.probability = p;
    s.nodes.resize(key.size() / 2);
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        s.nodes[i].phase = static_cast<LtuPhase>(key[2 * i]);
        s.nodes[i].remaining = key[2 * i + 1];
    }
    return s;
}

std::vector<std::size_t> eligible_in(const PhaseKey& phases, const Graph& adj)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        if (phases[i] != LtuPhase::Pending) continue;
        const auto& nb = adj.neighbors(i);
        const bool blocked = std::any_of(nb.begin(), nb.end(), [&](std::size_t m) {
            return phases[m] == LtuPhase::Transmitting;
        });
        if (!blocked) out.push_back(i);
    }
    return out;
}

// Start loop from a transient phase vector: returns the distribution of
// phase vectors once no node is eligible any more.
std::map<PhaseKey, double> start_loop(PhaseKey phases, const Graph& adj)
{
    // A pending, eligible node with no pending neighbour starts in every
    // ordering, so it does not branch.
    for (std::size_t i = 0; i < phases.size(); ++i) {
        if (phases[i] != LtuPhase::Pending) continue;
        const auto& nb = adj.neighbors(i);
        const bool free = std::all_of(nb.begin(), nb.end(),
                                      [&](std::size_t m) { return phases[m] == LtuPhase::Done; });
        if (free) phases[i] = LtuPhase::Transmitting;
    }

    std::map<PhaseKey, double> settled;
    std::map<PhaseKey, double> level{{std::move(phases), 1.0}};
    while (!level.empty()) {
        std::map<PhaseKey, double> next;
        for (const auto& [ph, p] : level) {
            const auto elig = eligible_in(ph, adj);
            if (elig.empty()) {
                settled[ph] += p;
                continue;
            }
            const double share = p / static_cast<double>(elig.size());
            for (auto e : elig) {
                PhaseKey child = ph;
                child[e] = LtuPhase::Transmitting;
                next[child] += share;
            }
        }
        level = std::move(next);
    }
    return settled;
}

std::int64_t checked_lcm(std::int64_t a, std::int64_t b)
{
    const std::int64_t g = std::gcd(a, b);
    const std::int64_t q = b / g;
    if (a > std::numeric_limits<std::int64_t>::max() / q)
        throw ResourceError("duty-cycle denominators overflow the exact time grid");
    return a * q;
}

}  // namespace

bool NetworkState::stable() const
{
    return std::all_of(nodes.begin(), nodes.end(),
                       [](const LtuNodeState& n) { return n.phase == LtuPhase::Done; });
}

std::vector<LtuPhase> NetworkState::phases() const
{
    std::vector<LtuPhase> out;
    out.reserve(nodes.size());
    for (const auto& n : nodes) out.push_back(n.phase);
    return out;
}

double LtuSchedule::to_seconds(Ticks t) const
{
    return static_cast<double>(t) / static_cast<double>(frame_ticks) * frame_seconds;
}

Ticks LtuSchedule::to_ticks(double seconds) const
{
    const double x = seconds / frame_seconds * static_cast<double>(frame_ticks);
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<Ticks>(r);
    return static_cast<Ticks>(std::floor(x));
}

void LtuSchedule::validate() const
{
    if (frame_ticks <= 0) throw ValidationError("schedule: frame must be positive");
    if (!(frame_seconds > 0.0)) throw ValidationError("schedule: frame duration must be positive");
    for (auto a : allotments) {
        if (a <= 0) throw ValidationError("schedule: allotments must be positive");
        // a <= 0.95 frame, evaluated exactly
        if (a > frame_ticks || a * 20 > frame_ticks * 19)
            throw ValidationError("schedule: allotment exceeds 95% of the frame");
    }
}

LtuSchedule make_schedule(const std::vector<DutyFraction>& duties, double frame_seconds)
{
    LtuSchedule s;
    s.frame_seconds = frame_seconds;
    std::int64_t grid = 1;
    for (const auto& d : duties) {
        if (d.num <= 0 || d.den <= 0) throw ValidationError("schedule: duty fraction must be positive");
        grid = checked_lcm(grid, d.den);
    }
    s.frame_ticks = grid;
    for (const auto& d : duties) s.allotments.push_back(d.num * (grid / d.den));
    s.validate();
    return s;
}

LtuSchedule make_schedule(const ContentionGraphs& graphs, double frame_seconds)
{
    std::vector<DutyFraction> duties;
    for (auto v : graphs.ltu_nodes) duties.push_back(duty_fraction(v, graphs));
    return make_schedule(duties, frame_seconds);
}

NetworkState initial_state(const LtuSchedule& schedule)
{
    NetworkState s;
    for (auto a : schedule.allotments) s.nodes.push_back({LtuPhase::Pending, a});
    return s;
}

std::vector<std::size_t> eligible_starters(const NetworkState& s, const Graph& ltu_adj)
{
    return eligible_in(s.phases(), ltu_adj);
}

std::vector<std::pair<NetworkState, double>> expand(const NetworkState& s, const Graph& ltu_adj)
{
    if (s.stable()) throw UsageError("expand: state is stable");
    if (ltu_adj.size() != s.nodes.size()) throw UsageError("expand: graph size mismatch");

    // Countdown to the next completion (zero when nothing transmits yet).
    Ticks delta = 0;
    bool any_tx = false;
    for (const auto& n : s.nodes) {
        if (n.phase != LtuPhase::Transmitting) continue;
        delta = any_tx ? std::min(delta, n.remaining) : n.remaining;
        any_tx = true;
    }

    NetworkState base = s;
    base.entry_time = s.entry_time + delta;
    for (auto& n : base.nodes) {
        if (n.phase != LtuPhase::Transmitting) continue;
        n.remaining -= delta;
        if (n.remaining == 0) n.phase = LtuPhase::Done;  // simultaneous completions commute
    }

    std::vector<std::pair<NetworkState, double>> out;
    for (const auto& [phases, p] : start_loop(base.phases(), ltu_adj)) {
        NetworkState child = base;
        for (std::size_t i = 0; i < phases.size(); ++i) child.nodes[i].phase = phases[i];
        child.probability = s.probability * p;
        out.emplace_back(std::move(child), p);
    }
    return out;
}

SegmentCover build_segments(const LtuSchedule& schedule, const Graph& ltu_adj,
                            const EnumerationOptions& options)
{
    schedule.validate();
    if (ltu_adj.size() != schedule.size()) throw UsageError("build_segments: graph size mismatch");

    SegmentCover cover;
    cover.schedule = schedule;
    const std::size_t n = schedule.size();
    const Ticks frame = schedule.frame_ticks;
    std::vector<double> on_ticks(n, 0.0);
    std::vector<char> truncated(n, 0);

    auto emit = [&](const NetworkState& st, Ticks start, Ticks end, double p) {
        if (cover.segments.size() >= options.max_segments) {
            throw ResourceError("state enumeration exceeded " + std::to_string(options.max_segments) +
                                " segments (" + std::to_string(n) + " LTE-U nodes)");
        }
        Segment seg;
        seg.state_id = cover.segments.size();
        seg.phases = st.phases();
        seg.start = start;
        seg.end = end;
        seg.probability = p;
        for (std::size_t i = 0; i < n; ++i) {
            if (seg.phases[i] == LtuPhase::Transmitting)
                on_ticks[i] += p * static_cast<double>(end - start);
        }
        cover.segments.push_back(std::move(seg));
    };

    std::map<Ticks, std::map<StateKey, double>> agenda;
    const NetworkState init = initial_state(schedule);
    if (init.stable()) {
        emit(init, 0, frame, 1.0);
    } else {
        for (const auto& [child, p] : expand(init, ltu_adj)) agenda[0][encode(child)] += p;
    }

    while (!agenda.empty()) {
        auto node = agenda.extract(agenda.begin());
        const Ticks t = node.key();
        for (const auto& [key, p] : node.mapped()) {
            const NetworkState st = decode(key, t, p);
            if (st.stable()) {
                if (t < frame) emit(st, t, frame, p);
                continue;
            }
            Ticks next = std::numeric_limits<Ticks>::max();
            for (const auto& ns : st.nodes) {
                if (ns.phase == LtuPhase::Transmitting) next = std::min(next, t + ns.remaining);
            }
            if (next > frame) {
                // Cannot finish inside the frame: cut the branch at the frame end.
                if (t < frame) emit(st, t, frame, p);
                for (std::size_t i = 0; i < n; ++i) {
                    if (st.nodes[i].phase != LtuPhase::Done) truncated[i] = 1;
                }
                continue;
            }
            emit(st, t, next, p);
            for (const auto& [child, b] : expand(st, ltu_adj)) agenda[next][encode(child)] += p * b;
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        cover.expected_on_seconds.push_back(on_ticks[i] / static_cast<double>(frame) *
                                            schedule.frame_seconds);
        if (truncated[i]) {
            cover.truncated_nodes.push_back(i);
            std::ostringstream msg;
            msg << "LTE-U node #" << i << " cannot complete its ON time in some branches; "
                << "truncated at frame end (expected ON " << cover.expected_on_seconds.back()
                << " s of " << schedule.to_seconds(schedule.allotments[i]) << " s)";
            cover.warnings.push_back(msg.str());
        }
    }
    return cover;
}

double mass_at(const SegmentCover& cover, Ticks t)
{
    double sum = 0.0;
    for (const auto& s : cover.segments) {
        if (s.start <= t && t < s.end) sum += s.probability;
    }
    return sum;
}

namespace {

Ticks checked_time(const SegmentCover& cover, double t_seconds)
{
    if (!(t_seconds >= 0.0) || !(t_seconds < cover.schedule.frame_seconds))
        throw std::domain_error("time outside the frame");
    return std::min(cover.schedule.to_ticks(t_seconds), cover.schedule.frame_ticks - 1);
}

}  // namespace

double state_probability(const SegmentCover& cover, const std::vector<LtuPhase>& phases, Ticks t)
{
    if (t < 0 || t >= cover.schedule.frame_ticks) throw std::domain_error("time outside the frame");
    double sum = 0.0;
    for (const auto& s : cover.segments) {
        if (s.start <= t && t < s.end && s.phases == phases) sum += s.probability;
    }
    return sum;
}

double state_probability(const SegmentCover& cover, const std::vector<LtuPhase>& phases,
                         double t_seconds)
{
    return state_probability(cover, phases, checked_time(cover, t_seconds));
}

std::array<double, 3> node_state_probability(const SegmentCover& cover, std::size_t node, Ticks t)
{
    if (node >= cover.schedule.size()) throw UsageError("node_state_probability: bad node index");
    if (t < 0 || t >= cover.schedule.frame_ticks) throw std::domain_error("time outside the frame");
    std::array<double, 3> psi{0.0, 0.0, 0.0};
    for (const auto& s : cover.segments) {
        if (s.start <= t && t < s.end) psi[static_cast<std::size_t>(s.phases[node])] += s.probability;
    }
    return psi;
}

std::array<double, 3> node_state_probability(const SegmentCover& cover, std::size_t node,
                                             double t_seconds)
{
    return node_state_probability(cover, node, checked_time(cover, t_seconds));
}

std::string phases_to_string(const std::vector<LtuPhase>& phases)
{
    std::string s;
    for (auto p : phases) s.push_back(static_cast<char>('0' + static_cast<int>(p)));
    return s;
}

void write_segments_csv(std::ostream& os, const SegmentCover& cover)
{
    os << "state_id,chi,t_start_us,t_end_us,probability\n";
    const auto old = os.flags();
    for (const auto& s : cover.segments) {
        os << s.state_id << ',' << phases_to_string(s.phases) << ',' << std::fixed
           << std::setprecision(3) << cover.schedule.to_seconds(s.start) * 1e6 << ','
           << cover.schedule.to_seconds(s.end) * 1e6 << ',' << std::setprecision(12)
           << s.probability << '\n';
    }
    os.flags(old);
}

}  // namespace coex

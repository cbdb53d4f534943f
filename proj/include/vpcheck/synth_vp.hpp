#pragma once

#include "vpcheck/spec_properties.hpp"
#include "vpcheck/trace_ingest.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace vpcheck {

/// Seeded generator shared by trace generation and fault injection.
///
/// Raw output is std::mt19937_64, whose sequence the C++ standard fixes.
/// Bounded draws use rejection sampling on the raw 64-bit output
/// (discarding values >= 2^64 - 2^64 mod n, then taking the remainder) and
/// unit draws use the top 53 bits, so a seed reproduces the same trace on
/// every conforming platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed): engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    std::uint64_t below(std::uint64_t n);
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi); // inclusive
    double unit();

    /// Index drawn proportionally to `weights` (non-negative, some positive).
    std::size_t weighted(const std::vector<double>& weights);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

struct TargetConfig {
    std::string path;
    AddressRange range; // memory map entry
    std::uint64_t latency_ps = 10000;

    friend bool operator==(const TargetConfig&, const TargetConfig&) = default;
};

/// Initiators reach every target, through the interconnect when present.
struct Topology {
    std::vector<std::string> initiators;
    std::optional<std::string> interconnect;
    std::vector<TargetConfig> targets;
    std::uint64_t interconnect_delay_ps = 0;

    std::vector<ModuleRef> modules() const;
    const TargetConfig* target_for(std::uint64_t address) const;
    std::uint64_t path_latency(const TargetConfig& t) const;

    friend bool operator==(const Topology&, const Topology&) = default;
};

struct Workload {
    std::uint64_t n_transactions = 0;
    std::map<int, double> tt_mix;              // type id -> weight
    std::map<std::string, double> cmd_mix;     // "READ"/"WRITE"/"IGNORE" -> weight
    std::vector<std::uint64_t> data_lengths{4}; // bytes, drawn uniformly
    std::uint64_t gap_ps = 5000;                // idle time between an initiator's transactions
    bool jitter = true;                         // total delay drawn in [3/4 latency, latency]
    std::uint64_t seed = 1;

    std::vector<int> active_types() const; // ids with positive weight, ascending

    friend bool operator==(const Workload&, const Workload&) = default;
};

struct GenConfig {
    std::string design = "synthetic-vp";
    Topology topology;
    Workload workload;

    friend bool operator==(const GenConfig&, const GenConfig&) = default;
};

/// Throws Error{ConfigError}.
GenConfig parse_gen_config(std::string_view text);
GenConfig read_gen_config(const std::filesystem::path& path);
std::string serialize_gen_config(const GenConfig& cfg);

/// Throws Error{ConfigError} when the topology or workload breaks its
/// invariants.
void validate_config(const GenConfig& cfg);

/// A protocol-clean trace: every lifetime classifies, passes every rule and
/// conforms to emit_reference_spec(cfg). Deterministic per seed.
Trace generate_trace(const GenConfig& cfg);

/// Functional entries list every reachable (initiator, target, range, type)
/// tuple; timing entries bound each by the configured path latency.
VpSpec emit_reference_spec(const GenConfig& cfg);

enum class FaultType { FT1, FT2, FT3 };
enum class FaultSubKind {
    RespInit,   // FT1: response status preset at the initiator
    LenMod,     // FT1: interconnect rewrites the data length
    PhaseOrder, // FT1: adjacent phases swapped or the final one dropped
    Addr,       // FT2: initiator address outside every memory-map range
    MemConfig,  // FT2: transaction routed to the wrong target
    Delay,      // FT3: final timing annotation inflated
};
std::string_view to_string(FaultType f);
std::string_view to_string(FaultSubKind k);

struct FaultPlan {
    FaultType fault = FaultType::FT1;
    FaultSubKind sub_kind = FaultSubKind::RespInit;
    std::uint64_t victim_count = 0;
    std::uint64_t seed = 1;
    std::vector<TargetConfig> memory_map; // needed by FT2 Addr

    friend bool operator==(const FaultPlan&, const FaultPlan&) = default;
};

FaultPlan parse_fault_plan(std::string_view text);
std::string serialize_fault_plan(const FaultPlan& plan);

struct GroundTruth {
    std::uint64_t tx_id = 0;
    std::string fault; // e.g. "FT1/RESP_INIT"

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct InjectionResult {
    Trace trace;
    std::vector<GroundTruth> truth; // sorted by tx_id
};

/// Mutates exactly plan.victim_count distinct transactions of a clean
/// trace. Throws Error{ConfigError} when too few transactions qualify.
InjectionResult inject_fault(const Trace& clean, const FaultPlan& plan);

std::string serialize_truth(const std::vector<GroundTruth>& truth);
std::vector<GroundTruth> parse_truth(std::string_view text);

/// Replicas of the three benchmark shapes (component count, transaction
/// count, type count, timing model).
GenConfig routing_replica(std::uint64_t seed);
GenConfig at_replica(std::uint64_t seed);
GenConfig mixed_replica(std::uint64_t seed);

} // namespace vpcheck

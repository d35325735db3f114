#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fhss/iq_io.hpp"
#include "fhss/synth.hpp"

namespace fhss {

// A complete synthesis setup: sources, channel, capture parameters.
struct Scenario {
    double duration_s = 0.0495;
    double sample_rate_hz = 8e6;
    double center_frequency_hz = 2.44e9;
    std::string capture_id = "synthetic";
    std::vector<SourceProfile> sources;
    ChannelConfig channel;
    std::uint64_t seed = 1;
};

void validate(const Scenario& scenario);

Scenario scenario_from_json_file(const std::string& path);
void scenario_to_json_file(const Scenario& scenario, const std::string& path);

// Ground-truth plan for every source, carrier phases already drawn.
std::vector<HopPlanEntry> build_truth(const Scenario& scenario);

// Truth file I/O (JSON list of hop entries plus capture parameters).
void truth_to_json_file(const Scenario& scenario, const std::vector<HopPlanEntry>& truth,
                        const std::string& path);
struct TruthFile {
    double sample_rate_hz = 0.0;
    double center_frequency_hz = 0.0;
    std::string capture_id;
    std::vector<HopPlanEntry> hops;
};
TruthFile truth_from_json_file(const std::string& path);

// Renders all sources and applies the channel.
IqRecording synthesize(const Scenario& scenario);
IqRecording synthesize(const Scenario& scenario, const std::vector<HopPlanEntry>& truth);

// Named reference setups.
//   futaba-fidelity : 80 MS/s over the full 80 MHz band, paper-scale carriers
//   futaba-desk     : 8 MS/s over an 8 MHz band, carrier offsets divided by 10
//   twin-source     : two interleaved controllers on disjoint carrier sets
//   noise           : no sources, noise floor only
Scenario preset_scenario(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace fhss

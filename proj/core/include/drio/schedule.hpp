#pragma once

#include <string>
#include <vector>

#include "drio/train.hpp"

namespace drio {

/// One parametric-Gaussian scheduler instruction.  Times are quantized to
/// the document's dt_ns grid; the amplitude is dimensionless in [0, 1]
/// relative to the declared max_rabi_rad_per_ns.
struct ScheduleInstruction {
    double t0_ns = 0.0;
    double sigma_ns = 0.0;
    double amplitude = 0.0;
    double phase_rad = 0.0;
    std::string channel = "d0";
};

struct ScheduleMetadata {
    std::string protocol_tag;
    int order = 0;
    int pulse_count = 0;  // N
    double total_duration_ns = 0.0;
};

/// Serializable pulse program: ordered parametric-Gaussian entries on a
/// fixed time grid, plus provenance metadata.
struct ScheduleDocument {
    std::string version = "1";
    double dt_ns = 2.0 / 9.0;
    double max_rabi_rad_per_ns = 0.0;
    std::vector<ScheduleInstruction> instructions;
    ScheduleMetadata metadata;
};

/// Compiles a subpulse train into a schedule.  Pulse centers are snapped to
/// the dt_ns grid and amplitudes are stored with ~1/65535 relative
/// quantization against the train's peak Rabi rate.
ScheduleDocument export_schedule(const SubpulseTrain& train, double dt_ns = 2.0 / 9.0,
                                 const ScheduleMetadata& metadata = {});

/// Reconstructs the (quantized) train from a schedule document.
SubpulseTrain parse_schedule(const ScheduleDocument& doc);

/// Structural checks: positive dt and sigma, amplitudes in [0, 1],
/// non-decreasing instruction times, times on the dt grid.
/// Throws std::invalid_argument on the first violation.
void validate_schedule(const ScheduleDocument& doc);

std::string schedule_to_json(const ScheduleDocument& doc);
ScheduleDocument schedule_from_json(const std::string& text);

void save_schedule_file(const ScheduleDocument& doc, const std::string& path);
ScheduleDocument load_schedule_file(const std::string& path);

} // namespace drio

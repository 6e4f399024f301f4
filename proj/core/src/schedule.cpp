#include "drio/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace drio {

namespace {

constexpr double kAmplitudeLevels = 65535.0;

double quantize_time(double t, double dt) { return dt * std::round(t / dt); }

double quantize_amplitude(double a)
{
    return std::round(std::clamp(a, 0.0, 1.0) * kAmplitudeLevels) / kAmplitudeLevels;
}

} // namespace

ScheduleDocument export_schedule(const SubpulseTrain& train, double dt_ns,
                                 const ScheduleMetadata& metadata)
{
    if (!(dt_ns > 0.0)) {
        throw std::invalid_argument("export_schedule: dt_ns must be > 0");
    }
    if (train.shape != SubpulseShape::gaussian) {
        throw std::invalid_argument("export_schedule: only gaussian trains are exportable");
    }
    if (train.pulses.empty()) {
        // An empty train is a valid (empty) pulse program.
        ScheduleDocument doc;
        doc.dt_ns = dt_ns;
        doc.metadata = metadata;
        return doc;
    }

    double max_rabi = 0.0;
    for (const Subpulse& p : train.pulses) max_rabi = std::max(max_rabi, p.omega);
    if (!(max_rabi > 0.0)) {
        throw std::invalid_argument("export_schedule: train has no positive amplitude");
    }

    ScheduleDocument doc;
    doc.dt_ns = dt_ns;
    doc.max_rabi_rad_per_ns = max_rabi;
    doc.metadata = metadata;
    if (doc.metadata.pulse_count == 0) doc.metadata.pulse_count = train.count();
    if (doc.metadata.total_duration_ns == 0.0) {
        doc.metadata.total_duration_ns = train.duration();
    }

    doc.instructions.reserve(train.pulses.size());
    for (const Subpulse& p : train.pulses) {
        ScheduleInstruction ins;
        ins.t0_ns = quantize_time(p.t, dt_ns);
        ins.sigma_ns = train.sigma;
        ins.amplitude = quantize_amplitude(p.omega / max_rabi);
        ins.phase_rad = p.phase;
        doc.instructions.push_back(ins);
    }
    return doc;
}

SubpulseTrain parse_schedule(const ScheduleDocument& doc)
{
    validate_schedule(doc);
    SubpulseTrain train;
    if (doc.instructions.empty()) {
        train.shape = SubpulseShape::gaussian;
        return train;
    }
    train.sigma = doc.instructions.front().sigma_ns;
    train.shape = SubpulseShape::gaussian;
    const auto n = doc.instructions.size();
    if (n >= 2) {
        train.tau = (doc.instructions[1].t0_ns - doc.instructions[0].t0_ns);
    } else if (doc.metadata.total_duration_ns > 0.0) {
        train.tau = doc.metadata.total_duration_ns;
    } else {
        train.tau = 2.0 * doc.instructions.front().t0_ns;
    }
    train.pulses.reserve(n);
    for (const ScheduleInstruction& ins : doc.instructions) {
        train.pulses.push_back(
            {ins.t0_ns, ins.amplitude * doc.max_rabi_rad_per_ns, ins.phase_rad});
    }
    return train;
}

void validate_schedule(const ScheduleDocument& doc)
{
    if (!(doc.dt_ns > 0.0)) {
        throw std::invalid_argument("schedule: dt_ns must be > 0");
    }
    if (doc.instructions.empty()) return;  // an empty program is valid
    if (!(doc.max_rabi_rad_per_ns > 0.0)) {
        throw std::invalid_argument("schedule: max_rabi_rad_per_ns must be > 0");
    }
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < doc.instructions.size(); ++i) {
        const ScheduleInstruction& ins = doc.instructions[i];
        if (!(ins.sigma_ns > 0.0)) {
            throw std::invalid_argument("schedule: sigma_ns must be > 0");
        }
        if (ins.amplitude < 0.0 || ins.amplitude > 1.0) {
            throw std::invalid_argument("schedule: amplitude outside [0, 1]");
        }
        if (ins.t0_ns < prev) {
            throw std::invalid_argument("schedule: instruction times must be non-decreasing");
        }
        const double cells = ins.t0_ns / doc.dt_ns;
        if (std::fabs(cells - std::round(cells)) > 1e-9 * std::max(1.0, cells)) {
            throw std::invalid_argument("schedule: t0_ns not aligned to the dt_ns grid");
        }
        prev = ins.t0_ns;
    }
}

std::string schedule_to_json(const ScheduleDocument& doc)
{
    nlohmann::json j;
    j["version"] = doc.version;
    j["dt_ns"] = doc.dt_ns;
    j["max_rabi_rad_per_ns"] = doc.max_rabi_rad_per_ns;
    nlohmann::json instructions = nlohmann::json::array();
    for (const ScheduleInstruction& ins : doc.instructions) {
        instructions.push_back({{"type", "parametric_gaussian"},
                                {"t0_ns", ins.t0_ns},
                                {"sigma_ns", ins.sigma_ns},
                                {"amplitude", ins.amplitude},
                                {"phase_rad", ins.phase_rad},
                                {"channel", ins.channel}});
    }
    j["instructions"] = std::move(instructions);
    j["metadata"] = {{"protocol_tag", doc.metadata.protocol_tag},
                     {"order", doc.metadata.order},
                     {"N", doc.metadata.pulse_count},
                     {"total_duration_ns", doc.metadata.total_duration_ns}};
    return j.dump(2) + "\n";
}

ScheduleDocument schedule_from_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("schedule: malformed JSON: ") + e.what());
    }
    for (const char* field : {"version", "dt_ns", "max_rabi_rad_per_ns", "instructions"}) {
        if (!j.contains(field)) {
            throw std::invalid_argument(std::string("schedule: missing field '") + field + "'");
        }
    }
    ScheduleDocument doc;
    doc.version = j.at("version").get<std::string>();
    doc.dt_ns = j.at("dt_ns").get<double>();
    doc.max_rabi_rad_per_ns = j.at("max_rabi_rad_per_ns").get<double>();
    for (const nlohmann::json& e : j.at("instructions")) {
        if (e.value("type", std::string{}) != "parametric_gaussian") {
            throw std::invalid_argument("schedule: unsupported instruction type");
        }
        ScheduleInstruction ins;
        ins.t0_ns = e.at("t0_ns").get<double>();
        ins.sigma_ns = e.at("sigma_ns").get<double>();
        ins.amplitude = e.at("amplitude").get<double>();
        ins.phase_rad = e.at("phase_rad").get<double>();
        ins.channel = e.value("channel", std::string("d0"));
        doc.instructions.push_back(std::move(ins));
    }
    if (j.contains("metadata")) {
        const nlohmann::json& m = j.at("metadata");
        doc.metadata.protocol_tag = m.value("protocol_tag", std::string{});
        doc.metadata.order = m.value("order", 0);
        doc.metadata.pulse_count = m.value("N", 0);
        doc.metadata.total_duration_ns = m.value("total_duration_ns", 0.0);
    }
    validate_schedule(doc);
    return doc;
}

void save_schedule_file(const ScheduleDocument& doc, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("schedule: cannot open '" + path + "' for writing");
    out << schedule_to_json(doc);
}

ScheduleDocument load_schedule_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("schedule: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return schedule_from_json(text);
}

} // namespace drio

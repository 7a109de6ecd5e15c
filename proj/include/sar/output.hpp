#ifndef SAR_OUTPUT_HPP
#define SAR_OUTPUT_HPP

#include <string>
#include <vector>

#include "sar/bohmian.hpp"
#include "sar/observables.hpp"
#include "sar/run_config.hpp"
#include "sar/superarrival.hpp"

namespace sar {

inline constexpr const char* kToolName = "superarrivals";
inline constexpr const char* kToolVersion = "0.1.0";

/// A transmission series in the reporting units of the files (t in t0).
struct ReducedSeries {
    std::string label;
    double x_d_over_sigma1 = 0.0;
    double t_p_over_t0 = 0.0;
    double epsilon_over_t0 = 0.0;
    double delta_dev = 0.0;
    std::vector<double> t_over_t0;
    std::vector<double> values;
};

ReducedSeries reduce_series(const TransmissionSeries& s, const UnitSystem& units,
                            double t_p, double epsilon, double delta_dev);

/// CSV with a '#'-prefixed header block (units, provenance), full precision.
void write_series_csv(const std::string& path, const ReducedSeries& series,
                      const std::string& hash);
ReducedSeries read_series_csv(const std::string& path);

void write_expectations_csv(const std::string& path, const ExpectationSeries& series,
                            const UnitSystem& units, const std::string& hash);

void write_sweep_csv(const std::string& path, const SweepResult& sweep, const UnitSystem& units,
                     const std::string& hash);

void write_trajectories_csv(const std::string& path, const std::vector<Trajectory>& bundle,
                            const UnitSystem& units, const std::string& hash);

/// report.json computed from reduced series so that re-analysis of the
/// emitted files reproduces it byte for byte.
std::string build_pair_report_json(const ReducedSeries& reference, const ReducedSeries& perturbed);
void write_pair_report(const std::string& path, const ReducedSeries& reference,
                       const ReducedSeries& perturbed);

void write_manifest(const std::string& path, const RunConfig& cfg, const std::string& subcommand,
                    double wall_time_s, const std::vector<std::string>& outputs);

/// Observer dumping (x/sigma1, Re psi, Im psi) CSV files per sampled step.
class SnapshotWriter : public Observer {
public:
    SnapshotWriter(const SpatialGrid& grid, const UnitSystem& units, std::string directory,
                   std::size_t stride);
    void sample(std::size_t step, double t, const WaveState& state) override;
    const std::vector<std::string>& files() const { return files_; }

private:
    const SpatialGrid& grid_;
    const UnitSystem& units_;
    std::string directory_;
    std::size_t stride_;
    std::size_t count_ = 0;
    std::vector<std::string> files_;
};

} // namespace sar

#endif

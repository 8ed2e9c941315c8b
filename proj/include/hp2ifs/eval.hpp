#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hp2ifs/gallery.hpp"

namespace hp2ifs {

enum class Axis { Yaw, Pitch, Roll };

inline constexpr std::array<Axis, 3> kAxes = {Axis::Yaw, Axis::Pitch, Axis::Roll};

const char* to_string(Axis a);
double angle(const PoseLabel& p, Axis a);

struct Prediction {
    PoseLabel truth;
    PoseLabel predicted;
    std::string source_id;
    std::size_t distance = 0;
};

/// Plain |truth - predicted| in degrees, no wrap-around.
double abs_error(const Prediction& p, Axis a);

/// Mean absolute error along one axis. Throws InvalidArgument on an empty list.
double mae(const std::vector<Prediction>& preds, Axis a);

inline const std::vector<double> kDefaultThresholds = {0, 5, 10, 15, 20, 25};

/// Fraction of predictions with |error| <= t for each threshold t.
std::vector<double> cumulative_curve(const std::vector<Prediction>& preds, Axis a,
                                     const std::vector<double>& thresholds = kDefaultThresholds);

struct AngleBin {
    double center = 0.0;
    double mean_abs_error = 0.0;
    std::size_t count = 0;
};

/// Groups predictions by ground-truth angle into bins [k w - w/2, k w + w/2)
/// centered on multiples of `bin_width`. Empty bins are omitted.
std::vector<AngleBin> error_by_angle(const std::vector<Prediction>& preds, Axis a, double bin_width = 5.0);

/// Yaw, pitch and roll MAE plus their mean.
struct MaeRow {
    double yaw = 0.0;
    double pitch = 0.0;
    double roll = 0.0;
    double overall = 0.0;

    double operator[](Axis a) const;
};

MaeRow mae_row(const std::vector<Prediction>& preds);

/// Column-wise arithmetic mean of rows (the "mean" line under per-subset results).
MaeRow mean_row(const std::vector<MaeRow>& rows);

struct EvalReport {
    std::size_t count = 0;
    MaeRow mae;
    std::vector<double> thresholds;
    std::array<std::vector<double>, 3> curves;        ///< indexed like kAxes
    double bin_width = 5.0;
    std::array<std::vector<AngleBin>, 3> by_angle;    ///< indexed like kAxes
};

EvalReport make_report(const std::vector<Prediction>& preds,
                       const std::vector<double>& thresholds = kDefaultThresholds, double bin_width = 5.0);

struct LeaveOneSubjectOut {
    std::string subject;  ///< run only this fold when non-empty
};

struct RandomSplit {
    double model_fraction = 0.8;
    std::uint64_t seed = 7;
};

using Protocol = std::variant<LeaveOneSubjectOut, RandomSplit>;

struct SubsetResult {
    std::string subject;
    std::size_t count = 0;
    MaeRow mae;
};

struct ProtocolResult {
    std::string protocol;                  ///< "loo" or "random"
    std::vector<SubsetResult> subsets;     ///< leave-one-subject-out folds
    MaeRow subset_mean;                    ///< mean of the fold rows (loo only)
    EvalReport pooled;                     ///< every prediction of every fold
    std::vector<Prediction> predictions;   ///< in evaluation order
    std::vector<std::string> warnings;
};

struct ProtocolOptions {
    HammingMode hamming = HammingMode::Symbol;
    unsigned threads = 0;
    std::vector<double> thresholds = kDefaultThresholds;
    double bin_width = 5.0;
};

/// Runs the protocol over in-memory images. Every image is encoded once and
/// the folds reuse the vectors.
ProtocolResult run_protocol(const std::vector<LabeledImage>& images, const EncoderConfig& cfg,
                            const Protocol& protocol, const ProtocolOptions& opts = {});

/// Loads the manifest images (all-or-nothing) and runs the protocol.
ProtocolResult run_protocol(const Manifest& manifest, const EncoderConfig& cfg, const Protocol& protocol,
                            const ProtocolOptions& opts = {});

/// Vector-level protocol used by both overloads above.
ProtocolResult run_protocol(const std::vector<GalleryEntry>& described, const EncoderConfig& cfg,
                            const Protocol& protocol, const ProtocolOptions& opts = {});

std::string report_to_json(const ProtocolResult& r);
std::string report_to_text(const ProtocolResult& r);
/// axis,threshold,fraction
std::string curves_to_csv(const EvalReport& r);
/// axis,bin_center,mean_abs_error,count
std::string histogram_to_csv(const EvalReport& r);
/// source_id,truth_pitch,truth_yaw,truth_roll,pred_pitch,pred_yaw,pred_roll,distance
std::string predictions_to_csv(const std::vector<Prediction>& preds);

}  // namespace hp2ifs

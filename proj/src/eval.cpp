#include "hp2ifs/eval.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <set>

#include "hp2ifs/parallel.hpp"
#include "json.hpp"

namespace hp2ifs {

const char* to_string(Axis a) {
    switch (a) {
        case Axis::Yaw: return "yaw";
        case Axis::Pitch: return "pitch";
        case Axis::Roll: return "roll";
    }
    return "?";
}

double angle(const PoseLabel& p, Axis a) {
    switch (a) {
        case Axis::Yaw: return p.yaw;
        case Axis::Pitch: return p.pitch;
        case Axis::Roll: return p.roll;
    }
    return 0.0;
}

double abs_error(const Prediction& p, Axis a) { return std::abs(angle(p.truth, a) - angle(p.predicted, a)); }

namespace {

void require_non_empty(const std::vector<Prediction>& preds) {
    if (preds.empty()) throw InvalidArgument("no predictions to evaluate");
}

std::size_t axis_slot(Axis a) { return static_cast<std::size_t>(a); }

}  // namespace

double mae(const std::vector<Prediction>& preds, Axis a) {
    require_non_empty(preds);
    double sum = 0.0;
    for (const auto& p : preds) sum += abs_error(p, a);
    return sum / static_cast<double>(preds.size());
}

std::vector<double> cumulative_curve(const std::vector<Prediction>& preds, Axis a,
                                     const std::vector<double>& thresholds) {
    require_non_empty(preds);
    std::vector<double> out;
    out.reserve(thresholds.size());
    for (double t : thresholds) {
        std::size_t hits = 0;
        for (const auto& p : preds) hits += abs_error(p, a) <= t;
        out.push_back(static_cast<double>(hits) / static_cast<double>(preds.size()));
    }
    return out;
}

std::vector<AngleBin> error_by_angle(const std::vector<Prediction>& preds, Axis a, double bin_width) {
    require_non_empty(preds);
    if (!(bin_width > 0.0)) throw InvalidArgument("bin width must be positive");
    std::map<long long, std::pair<double, std::size_t>> bins;
    for (const auto& p : preds) {
        const auto k = static_cast<long long>(std::floor(angle(p.truth, a) / bin_width + 0.5));
        auto& [sum, count] = bins[k];
        sum += abs_error(p, a);
        ++count;
    }
    std::vector<AngleBin> out;
    out.reserve(bins.size());
    for (const auto& [k, acc] : bins)
        out.push_back({static_cast<double>(k) * bin_width, acc.first / static_cast<double>(acc.second), acc.second});
    return out;
}

double MaeRow::operator[](Axis a) const {
    switch (a) {
        case Axis::Yaw: return yaw;
        case Axis::Pitch: return pitch;
        case Axis::Roll: return roll;
    }
    return 0.0;
}

MaeRow mae_row(const std::vector<Prediction>& preds) {
    MaeRow r;
    r.yaw = mae(preds, Axis::Yaw);
    r.pitch = mae(preds, Axis::Pitch);
    r.roll = mae(preds, Axis::Roll);
    r.overall = (r.yaw + r.pitch + r.roll) / 3.0;
    return r;
}

MaeRow mean_row(const std::vector<MaeRow>& rows) {
    if (rows.empty()) throw InvalidArgument("no rows to average");
    MaeRow m;
    for (const auto& r : rows) {
        m.yaw += r.yaw;
        m.pitch += r.pitch;
        m.roll += r.roll;
        m.overall += r.overall;
    }
    const auto n = static_cast<double>(rows.size());
    m.yaw /= n;
    m.pitch /= n;
    m.roll /= n;
    m.overall /= n;
    return m;
}

EvalReport make_report(const std::vector<Prediction>& preds, const std::vector<double>& thresholds,
                       double bin_width) {
    EvalReport r;
    r.count = preds.size();
    r.mae = mae_row(preds);
    r.thresholds = thresholds;
    r.bin_width = bin_width;
    for (Axis a : kAxes) {
        r.curves[axis_slot(a)] = cumulative_curve(preds, a, thresholds);
        r.by_angle[axis_slot(a)] = error_by_angle(preds, a, bin_width);
    }
    return r;
}

namespace {

std::size_t nearest(const std::vector<GalleryEntry>& entries, const std::vector<std::size_t>& model,
                    const CodeVector& v, HammingMode mode, std::size_t& distance) {
    std::size_t best = model.front();
    distance = hamming(v, entries[best].vector, mode);
    for (std::size_t k = 1; k < model.size(); ++k) {
        const auto d = hamming(v, entries[model[k]].vector, mode);
        if (d < distance) {
            distance = d;
            best = model[k];
        }
    }
    return best;
}

std::vector<Prediction> predict(const std::vector<GalleryEntry>& entries, const std::vector<std::size_t>& model,
                                const std::vector<std::size_t>& test, const ProtocolOptions& opts) {
    std::vector<Prediction> preds(test.size());
    parallel_for(test.size(), opts.threads, [&](std::size_t i) {
        const auto& probe = entries[test[i]];
        std::size_t d = 0;
        const auto hit = nearest(entries, model, probe.vector, opts.hamming, d);
        preds[i] = {probe.label, entries[hit].label, probe.source_id, d};
    });
    return preds;
}

}  // namespace

ProtocolResult run_protocol(const std::vector<GalleryEntry>& described, const EncoderConfig& cfg,
                            const Protocol& protocol, const ProtocolOptions& opts) {
    cfg.validate();
    ProtocolResult result;
    if (std::holds_alternative<LeaveOneSubjectOut>(protocol)) {
        result.protocol = "loo";
        std::vector<std::string> order;
        std::set<std::string, std::less<>> seen;
        for (const auto& e : described)
            if (!e.subject_id.empty() && seen.insert(e.subject_id).second) order.push_back(e.subject_id);
        if (order.empty()) throw InvalidArgument("leave-one-subject-out needs subject ids");
        if (const auto& only = std::get<LeaveOneSubjectOut>(protocol).subject; !only.empty()) {
            if (!seen.contains(only)) throw InvalidArgument("unknown subject: " + only);
            order = {only};
        }
        std::vector<MaeRow> rows;
        for (const auto& subject : order) {
            std::vector<std::size_t> model;
            std::vector<std::size_t> test;
            for (std::size_t i = 0; i < described.size(); ++i)
                (described[i].subject_id == subject ? test : model).push_back(i);
            if (model.empty()) {
                result.warnings.push_back("subject " + subject + " skipped: no model images remain");
                continue;
            }
            auto preds = predict(described, model, test, opts);
            const auto row = mae_row(preds);
            rows.push_back(row);
            result.subsets.push_back({subject, preds.size(), row});
            result.predictions.insert(result.predictions.end(), preds.begin(), preds.end());
        }
        if (!rows.empty()) result.subset_mean = mean_row(rows);
    } else {
        const auto& split = std::get<RandomSplit>(protocol);
        result.protocol = "random";
        const auto model = random_model_indices(described.size(), split.model_fraction, split.seed);
        std::vector<std::size_t> test;
        std::size_t next = 0;
        for (std::size_t i = 0; i < described.size(); ++i) {
            if (next < model.size() && model[next] == i)
                ++next;
            else
                test.push_back(i);
        }
        if (model.empty()) throw InvalidArgument("random split left the model empty");
        if (test.empty())
            result.warnings.push_back("random split left no test images");
        else
            result.predictions = predict(described, model, test, opts);
    }
    if (!result.predictions.empty())
        result.pooled = make_report(result.predictions, opts.thresholds, opts.bin_width);
    return result;
}

ProtocolResult run_protocol(const std::vector<LabeledImage>& images, const EncoderConfig& cfg,
                            const Protocol& protocol, const ProtocolOptions& opts) {
    const auto g = build_gallery(images, cfg, opts.threads);
    return run_protocol(g.entries, cfg, protocol, opts);
}

ProtocolResult run_protocol(const Manifest& manifest, const EncoderConfig& cfg, const Protocol& protocol,
                            const ProtocolOptions& opts) {
    const auto g = build_gallery(manifest, cfg, opts.threads);
    return run_protocol(g.entries, cfg, protocol, opts);
}

namespace {

using ojson = nlohmann::ordered_json;

ojson mae_json(const MaeRow& r) {
    return ojson{{"yaw", r.yaw}, {"pitch", r.pitch}, {"roll", r.roll}, {"overall", r.overall}};
}

std::string fixed(double v, int decimals = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string report_to_json(const ProtocolResult& r) {
    ojson j;
    j["protocol"] = r.protocol;
    j["count"] = r.pooled.count;
    j["mae"] = mae_json(r.pooled.mae);
    if (r.protocol == "loo") {
        ojson subsets = ojson::array();
        for (const auto& s : r.subsets) {
            auto row = mae_json(s.mae);
            row["subject"] = s.subject;
            row["count"] = s.count;
            subsets.push_back(row);
        }
        j["subsets"] = subsets;
        j["subset_mean"] = mae_json(r.subset_mean);
    }
    ojson curves;
    curves["thresholds"] = r.pooled.thresholds;
    for (Axis a : kAxes) curves[to_string(a)] = r.pooled.curves[axis_slot(a)];
    j["cumulative"] = curves;
    ojson bins;
    bins["bin_width"] = r.pooled.bin_width;
    for (Axis a : kAxes) {
        ojson rows = ojson::array();
        for (const auto& b : r.pooled.by_angle[axis_slot(a)])
            rows.push_back(ojson{{"center", b.center}, {"mae", b.mean_abs_error}, {"count", b.count}});
        bins[to_string(a)] = rows;
    }
    j["error_by_angle"] = bins;
    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

std::string report_to_text(const ProtocolResult& r) {
    std::string out;
    auto line = [&](const std::string& label, const MaeRow& m) {
        out += pad_right(label, 10) + pad(fixed(m.yaw), 8) + pad(fixed(m.pitch), 8) + pad(fixed(m.roll), 8) +
               pad(fixed(m.overall), 14) + "\n";
    };
    out += pad_right("Subset", 10) + pad("Yaw", 8) + pad("Pitch", 8) + pad("Roll", 8) + pad("overall MAE", 14) + "\n";
    if (r.protocol == "loo") {
        for (const auto& s : r.subsets) line(s.subject, s.mae);
        if (!r.subsets.empty()) line("mean", r.subset_mean);
    } else if (r.pooled.count > 0) {
        line("test", r.pooled.mae);
    }
    if (r.pooled.count > 0) {
        out += "\nCumulative error (fraction of " + std::to_string(r.pooled.count) + " images with error <= t)\n";
        out += pad_right("t (deg)", 10) + pad("Yaw", 8) + pad("Pitch", 8) + pad("Roll", 8) + "\n";
        for (std::size_t i = 0; i < r.pooled.thresholds.size(); ++i) {
            out += pad_right(fixed(r.pooled.thresholds[i], 0), 10);
            for (Axis a : kAxes) out += pad(fixed(r.pooled.curves[axis_slot(a)][i], 3), 8);
            out += "\n";
        }
    }
    for (const auto& w : r.warnings) out += "warning: " + w + "\n";
    return out;
}

std::string curves_to_csv(const EvalReport& r) {
    std::string out = "axis,threshold,fraction\n";
    for (Axis a : kAxes)
        for (std::size_t i = 0; i < r.thresholds.size() && i < r.curves[axis_slot(a)].size(); ++i)
            out += std::string(to_string(a)) + "," + fixed(r.thresholds[i], 6) + "," +
                   fixed(r.curves[axis_slot(a)][i], 6) + "\n";
    return out;
}

std::string histogram_to_csv(const EvalReport& r) {
    std::string out = "axis,bin_center,mean_abs_error,count\n";
    for (Axis a : kAxes)
        for (const auto& b : r.by_angle[axis_slot(a)])
            out += std::string(to_string(a)) + "," + fixed(b.center, 6) + "," + fixed(b.mean_abs_error, 6) + "," +
                   std::to_string(b.count) + "\n";
    return out;
}

std::string predictions_to_csv(const std::vector<Prediction>& preds) {
    std::string out = "source_id,truth_pitch,truth_yaw,truth_roll,pred_pitch,pred_yaw,pred_roll,distance\n";
    for (const auto& p : preds)
        out += p.source_id + "," + fixed(p.truth.pitch, 6) + "," + fixed(p.truth.yaw, 6) + "," +
               fixed(p.truth.roll, 6) + "," + fixed(p.predicted.pitch, 6) + "," + fixed(p.predicted.yaw, 6) + "," +
               fixed(p.predicted.roll, 6) + "," + std::to_string(p.distance) + "\n";
    return out;
}

}  // namespace hp2ifs

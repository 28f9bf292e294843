#pragma once

#include <cstdio>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace affmap::metrics {

/// Per-segment ground truth: delta_i = 1 for background (non-affording)
/// segments, 0 for affording ones.
using GroundTruth = std::vector<int>;

struct SoftCounts {
    double tp = 0.0, tn = 0.0, fp = 0.0, fn = 0.0;
    double gt_e = 0.0, gt_ne = 0.0;
};

/// Soft confusion counts from probabilistic predictions:
///   tp = sum p_i (1 - d_i), tn = sum (1 - p_i) d_i,
///   fp = sum p_i d_i,       fn = sum (1 - p_i)(1 - d_i).
inline SoftCounts soft_counts(std::span<const double> predictions, const GroundTruth& gt) {
    if (predictions.size() != gt.size()) throw std::invalid_argument("soft_counts: length mismatch");
    SoftCounts c;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double p = predictions[i];
        const double d = static_cast<double>(gt[i]);
        c.tp += p * (1.0 - d);
        c.tn += (1.0 - p) * d;
        c.fp += p * d;
        c.fn += (1.0 - p) * (1.0 - d);
        c.gt_e += 1.0 - d;
        c.gt_ne += d;
    }
    return c;
}

struct Scores {
    double precision = 0.0, recall = 0.0, accuracy = 0.0;
    // Degenerate denominators score 0 and are flagged so rows stay rectangular.
    std::string flags = "-";
};

inline Scores prf(const SoftCounts& c) {
    Scores s;
    std::string flags;
    auto flag = [&](const char* name) {
        if (!flags.empty()) flags += ';';
        flags += name;
    };
    if (c.tp + c.fp > 0.0) s.precision = c.tp / (c.tp + c.fp); else flag("precision_undefined");
    if (c.tp + c.fn > 0.0) s.recall = c.tp / (c.tp + c.fn); else flag("recall_undefined");
    if (c.gt_e > 0.0 && c.gt_ne > 0.0) {
        s.accuracy = 0.5 * (c.tp / c.gt_e + c.tn / c.gt_ne);
    } else {
        flag("accuracy_undefined");
    }
    if (!flags.empty()) s.flags = flags;
    return s;
}

struct MetricsRow {
    long iteration = 0;
    SoftCounts counts;
    Scores scores;
};

inline void write_metrics_header(std::ostream& out) {
    out << "iteration,tp,tn,fp,fn,precision,recall,accuracy,flags\n";
}

inline void write_metrics_row(const MetricsRow& row, std::ostream& out) {
    char buf[320];
    std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n",
                  row.iteration, row.counts.tp, row.counts.tn, row.counts.fp, row.counts.fn,
                  row.scores.precision, row.scores.recall, row.scores.accuracy,
                  row.scores.flags.c_str());
    out << buf;
}

}  // namespace affmap::metrics

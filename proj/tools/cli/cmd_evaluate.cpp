#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "memsim/error.hpp"
#include "memsim/eval.hpp"

namespace memsim::cli {

namespace {

struct EvaluateOptions {
  std::string predictions;
  std::string gt;
  double iou = 0.5;
  std::string ap_mode = "exact-auc";
  std::string report;
};

int run_evaluate(const EvaluateOptions& o, Streams io) {
  const ApMode mode = ap_mode_from_string(o.ap_mode);
  const EvalReport r = evaluate(load_prediction_manifest(o.predictions), load_manifest(o.gt), o.iou);
  if (!o.report.empty()) {
    auto doc = r.to_json();
    doc["ap_mode"] = o.ap_mode;
    std::ofstream f(o.report);
    if (!f) throw DataError("cannot write report " + o.report);
    f << doc.dump(2) << '\n';
  }
  char line[128];
  std::snprintf(line, sizeof(line), "AP = %.4f (%s, IoU %.2f)\n", r.ap(mode), o.ap_mode.c_str(), o.iou);
  io.out << line << "TP: " << r.tp << ", FP: " << r.fp << ", FN: " << r.fn << ", ground truth: " << r.total_gt
         << '\n';
  return kExitOk;
}

}  // namespace

Action register_evaluate(CLI::App& app) {
  auto o = std::make_shared<EvaluateOptions>();
  auto* sub = app.add_subcommand("evaluate", "Average precision of predictions against labelled ground truth");
  sub->add_option("--predictions", o->predictions, "Prediction manifest")->required()->check(CLI::ExistingFile);
  sub->add_option("--gt", o->gt, "Ground-truth dataset manifest")->required()->check(CLI::ExistingFile);
  sub->add_option("--iou", o->iou, "IoU threshold for a match")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub->add_option("--ap-mode", o->ap_mode, "AP interpolation")
      ->check(CLI::IsMember({"exact-auc", "40-point"}))
      ->capture_default_str();
  sub->add_option("--report", o->report, "Write the full report (counts, PR curve) as JSON");
  return [o](Streams io) { return run_evaluate(*o, io); };
}

}  // namespace memsim::cli

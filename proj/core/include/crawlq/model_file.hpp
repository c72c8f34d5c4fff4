#pragma once

// JSON model files. Layout:
//   {
//     "K": 5,
//     "validation": "strict" | "repair",      (optional, default strict)
//     "repair_cap": 0.1,                      (optional)
//     "arrival": {"kind": "direct",      "modes": [[D0, D1, ...], ...]}
//              | {"kind": "independent", "processes": [[D0, D1, ...], ...]}
//              | {"kind": "thinned",     "process": [D0, D1, ...], "q": [...]}
//              | {"kind": "bmmap",       "D0": M, "robots": [[D1, D2, ...], ...]},
//     "service":      {"init": [...], "subgen": [[...], ...]},
//     "obsolescence": {"init": [...], "subgen": [[...], ...]},
//     "costs": {"c_loss": 5, "c_obs": 10, "a": 2, "c_rob": 20, "c_star": 300},   (optional)
//     "name": "...", "notes": "..."                                             (optional)
//   }
// Matrices are arrays of rows. Unknown keys are errors.

#include <optional>
#include <string>
#include <vector>

#include "crawlq/arrivals.hpp"
#include "crawlq/generator.hpp"
#include "crawlq/linalg.hpp"
#include "crawlq/optimizer.hpp"

namespace crawlq {

enum class ArrivalKind { Direct, Independent, Thinned, Bmmap };

struct PhSpec {
    linalg::RowVector init;
    linalg::Matrix subgen;
};

/// The document as written, before validation.
struct ModelSpec {
    int capacity = 0;
    ValidationMode validation = ValidationMode::Strict;
    double repair_cap = 0.1;
    ArrivalKind kind = ArrivalKind::Direct;
    /// direct: one sequence per mode; independent: one per robot; thinned: exactly one.
    std::vector<std::vector<linalg::Matrix>> sequences;
    linalg::Matrix d0;                                  ///< bmmap only
    std::vector<std::vector<linalg::Matrix>> robots;    ///< bmmap only, robots[m−1][k−1]
    std::vector<double> q;                              ///< thinned only
    PhSpec service;
    PhSpec obsolescence;
    std::optional<CostCoefficients> costs;
    std::string name;
    std::string notes;
};

struct LoadedModel {
    QueueModel model;
    std::optional<CostCoefficients> costs;
    std::vector<std::string> repair_log;
    /// Repaired inputs with validation set to strict; emits a file that loads to the same model.
    ModelSpec canonical;
};

/// Schema check only. Throws ValidationError listing every problem found.
ModelSpec parse_model(const std::string& json_text);

/// Validates and composes. `mode` overrides the file's validation setting.
LoadedModel build_model(const ModelSpec& spec, std::optional<ValidationMode> mode = std::nullopt);

LoadedModel load_model_file(const std::string& path, std::optional<ValidationMode> mode = std::nullopt);

/// Fixed key order, full double precision.
std::string emit_model(const ModelSpec& spec);

std::string to_string(ArrivalKind kind);

}  // namespace crawlq

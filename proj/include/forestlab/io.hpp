#pragma once

#include <string>

#include <json.hpp>

#include "forestlab/experiments.hpp"
#include "forestlab/grid.hpp"
#include "forestlab/rationality.hpp"
#include "forestlab/sphere_cover.hpp"
#include "forestlab/torus_flow.hpp"

namespace forestlab {

using Json = nlohmann::json;

// Grid file: { "dimension": n, "grids": [ { "matrix": [[...]], "translation":
// [...] } ] }. Matrix entries are numbers or "p/q" strings; a matrix may also
// be the string "honeycomb". A bare preset name is accepted in place of a
// whole document.
Forest parse_forest(const Json& doc);
Forest load_forest(const std::string& path_or_preset);

// The planar hexagonal-packing basis, columns (1,0) and (1/2, sqrt(3)/2).
Matrix honeycomb_matrix();

Json forest_to_json(const Forest& forest);
Json verdict_to_json(const ForestVerdict& verdict);
Json density_to_json(const DensityReport& report);
Json filling_to_json(const FillingTime& fill);
Json cover_to_json(const CapCover& cover);
Json witness_to_json(const HitWitness& witness);
Json visibility_to_json(const VisibilityOutcome& outcome);

ExperimentManifest parse_manifest(const Json& doc);
Json manifest_to_json(const ExperimentManifest& manifest);
Json summary_to_json(const ExperimentResult& result);

// Raw per-(sample, epsilon) rows; the first line is a '#' comment holding the
// resolved manifest so every artifact carries its own provenance.
std::string experiment_csv(const ExperimentResult& result);

// Writes summary.json and raw.csv under result.manifest.out_dir.
void persist_experiment(const ExperimentResult& result);

std::string format_double(double x);  // shortest 17-significant-digit form
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace forestlab

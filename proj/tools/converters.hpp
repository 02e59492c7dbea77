#pragma once

#include <filesystem>

#include "mapmatch/trace.hpp"

// External-format ingestion for the convert subcommand.

// CSV with lat,lon,time columns (optional header naming them).
mapmatch::Trace convert_csv_trace(const std::filesystem::path& input);

// Best-effort converter for OSM-based benchmark datasets: an OSM XML road
// network, a GPX or CSV trace, and optionally a ground-truth node-id
// sequence, written as canonical network/trace/ground_truth files.
int convert_zenodo(const std::filesystem::path& input,
                   const std::filesystem::path& out_dir);

#pragma once

// Readers and writers for the JSON container shared by model, gain, graph,
// reference and interconnection files. Matrices are nested row-major arrays.
// Every reader throws InputError naming the offending field.

#include <string>

#include "rnncert/dynamics.hpp"
#include "rnncert/networks.hpp"
#include "rnncert/param_deq.hpp"

namespace rnncert {

/// Keys n, m, p, arch ("fr" | "hopfield"), time ("cts" | "disc"),
/// activation, W, B, C, D. B, C, D may be omitted when their dimension is 0.
SynapticModel model_from_text(const std::string& text);
std::string model_to_text(const SynapticModel& model);
SynapticModel parse_model(const std::string& path);
void write_model(const std::string& path, const SynapticModel& model);

/// Keys K_f, L, K_i, epsilon, c_K, c_O, c_r, P_X, P_O, P_R (P_R optional).
GainSet gains_from_text(const std::string& text);
std::string gains_to_text(const GainSet& g);
GainSet parse_gains(const std::string& path);

/// Keys starts (increasing, first 0) and values (one vector per segment).
PiecewiseConstant reference_from_text(const std::string& text);
PiecewiseConstant parse_reference(const std::string& path);

struct GraphFile {
  GraphModel model;
  GraphVariant variant;
  Matrix U;   // p x n node inputs (zeros when absent)
  Matrix X0;  // m x n initial features (zeros when absent)
};

/// Keys W, B, A, activation, optional U, X0, and optional H plus degree for
/// the symmetrizable variant.
GraphFile graph_from_text(const std::string& text);
GraphFile parse_graph(const std::string& path);

/// Keys subsystems (array of model objects) and coupling.
Interconnection interconnection_from_text(const std::string& text);
Interconnection parse_interconnection(const std::string& path);

/// Keys n, c, d, Y, eps_reg, activation, x_map, b_map; each map is an array
/// of layers {weight, bias, activation?}.
DeqSpec deq_from_text(const std::string& text);
std::string deq_to_text(const DeqSpec& spec);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace rnncert

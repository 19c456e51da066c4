#include "greeks/ad/tape.hpp"

#include <algorithm>
#include <string>

#include "greeks/errors.hpp"

namespace greeks::ad {

bool& domain_flag() {
  thread_local bool flag = false;
  return flag;
}

int Tape::new_input() {
  nodes_.push_back({-1, -1, 0.0, 0.0});
  inputs_.push_back(static_cast<int>(nodes_.size()) - 1);
  return inputs_.back();
}

bool Tape::is_input(int idx) const { return std::binary_search(inputs_.begin(), inputs_.end(), idx); }

// Backward pass with K adjoints per node stored contiguously in adj_.
template <int K>
void Tape::sweep(int top) const {
  const Node* nodes = nodes_.data();
  double* adj = adj_.data();
  for (int n = top; n >= 0; --n) {
    const Node& nd = nodes[n];
    const double* an = adj + static_cast<std::size_t>(n) * K;
    if (nd.a >= 0) {
      double* aa = adj + static_cast<std::size_t>(nd.a) * K;
      for (int o = 0; o < K; ++o) aa[o] += an[o] * nd.da;
    }
    if (nd.b >= 0) {
      double* ab = adj + static_cast<std::size_t>(nd.b) * K;
      for (int o = 0; o < K; ++o) ab[o] += an[o] * nd.db;
    }
  }
}

void Tape::check_inputs(std::span<const int> inputs) const {
  for (int i : inputs)
    if (!is_input(i)) throw UnmarkedInput("node " + std::to_string(i) + " is not a registered input");
}

std::vector<double> Tape::gradient(int output, std::span<const int> inputs) const {
  check_inputs(inputs);
  std::vector<double> g(inputs.size(), 0.0);
  if (output < 0) return g;
  int top = output;
  for (int i : inputs) top = std::max(top, i);
  adj_.assign(top + 1, 0.0);
  adj_[output] = 1.0;
  for (int n = output; n >= 0; --n) {
    double a = adj_[n];
    if (a == 0.0) continue;
    const Node& nd = nodes_[n];
    if (nd.a >= 0) adj_[nd.a] += a * nd.da;
    if (nd.b >= 0) adj_[nd.b] += a * nd.db;
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) g[i] = adj_[inputs[i]];
  return g;
}

void Tape::jacobian(std::span<const int> outputs, std::span<const int> inputs, std::span<double> jac) const {
  check_inputs(inputs);
  const std::size_t k = outputs.size();
  std::fill(jac.begin(), jac.end(), 0.0);
  int top = -1;
  for (int o : outputs) top = std::max(top, o);
  if (top < 0) return;
  for (int i : inputs) top = std::max(top, i);
  adj_.assign(static_cast<std::size_t>(top + 1) * k, 0.0);
  for (std::size_t o = 0; o < k; ++o)
    if (outputs[o] >= 0) adj_[outputs[o] * k + o] = 1.0;
  switch (k) {
    case 1: sweep<1>(top); break;
    case 2: sweep<2>(top); break;
    case 3: sweep<3>(top); break;
    case 4: sweep<4>(top); break;
    default:
      for (int n = top; n >= 0; --n) {
        const Node& nd = nodes_[n];
        double* an = &adj_[n * k];
        if (nd.a >= 0) {
          double* aa = &adj_[nd.a * k];
          for (std::size_t o = 0; o < k; ++o) aa[o] += an[o] * nd.da;
        }
        if (nd.b >= 0) {
          double* ab = &adj_[nd.b * k];
          for (std::size_t o = 0; o < k; ++o) ab[o] += an[o] * nd.db;
        }
      }
  }
  for (std::size_t o = 0; o < k; ++o)
    for (std::size_t i = 0; i < inputs.size(); ++i) jac[o * inputs.size() + i] = adj_[inputs[i] * k + o];
}

}  // namespace greeks::ad

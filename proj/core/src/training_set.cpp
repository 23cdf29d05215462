#include "estim/training_set.hpp"

#include <algorithm>

#include "estim/error.hpp"

namespace estim {

void TrainingSet::validate() const {
  const std::size_t n = size();
  if (inputs.empty() || inputs.dim(0) != n) {
    throw Error(Errc::ShapeMismatch, "training set inputs and targets disagree on record count");
  }
  if (ids.size() != n || origin_iteration.size() != n || replayed.size() != n) {
    throw Error(Errc::ShapeMismatch, "training set provenance length mismatch");
  }
}

TrainingSet select_records(const TrainingSet& set, std::span<const std::size_t> indices) {
  set.validate();
  auto in_shape = set.inputs.shape();
  auto t_shape = set.targets.shape();
  in_shape[0] = indices.size();
  t_shape[0] = indices.size();
  TrainingSet out{Tensor(in_shape), Tensor(t_shape), {}, {}, {}};
  const std::size_t in_w = set.inputs.row_size();
  const std::size_t t_w = set.targets.row_size();
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t i = indices[k];
    if (i >= set.size()) throw Error(Errc::InvalidArgument, "record index out of range");
    std::copy_n(set.inputs.row(i).data(), in_w, out.inputs.row(k).data());
    std::copy_n(set.targets.row(i).data(), t_w, out.targets.row(k).data());
    out.ids.push_back(set.ids[i]);
    out.origin_iteration.push_back(set.origin_iteration[i]);
    out.replayed.push_back(set.replayed[i]);
  }
  return out;
}

TrainingSet merge_records(const TrainingSet& a, const TrainingSet& b) {
  if (a.size() == 0) return b;
  if (b.size() == 0) return a;
  a.validate();
  b.validate();
  if (a.inputs.row_size() != b.inputs.row_size() || a.targets.row_size() != b.targets.row_size()) {
    throw Error(Errc::ShapeMismatch, "cannot merge training sets of different shapes");
  }
  auto in_shape = a.inputs.shape();
  auto t_shape = a.targets.shape();
  in_shape[0] = a.size() + b.size();
  t_shape[0] = a.size() + b.size();
  std::vector<double> in(a.inputs.storage());
  in.insert(in.end(), b.inputs.storage().begin(), b.inputs.storage().end());
  std::vector<double> tg(a.targets.storage());
  tg.insert(tg.end(), b.targets.storage().begin(), b.targets.storage().end());
  TrainingSet out{Tensor(in_shape, std::move(in)), Tensor(t_shape, std::move(tg)), a.ids,
                  a.origin_iteration, a.replayed};
  out.ids.insert(out.ids.end(), b.ids.begin(), b.ids.end());
  out.origin_iteration.insert(out.origin_iteration.end(), b.origin_iteration.begin(),
                              b.origin_iteration.end());
  out.replayed.insert(out.replayed.end(), b.replayed.begin(), b.replayed.end());
  return out;
}

}  // namespace estim

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nliaudit/corpus.hpp"
#include "nliaudit/protorole.hpp"

namespace nliaudit {

// Conditional probability of the majority label given a proto-role. With two
// labels maj_pr is always in [0.5, 1.0] and exactly 0.5 on a tie.
struct ProtoRoleBiasEntry {
  ProtoRole role = ProtoRole::kInstigation;
  Label majority_label = Label::kNotEntailed;
  double maj_pr = 0.0;
  std::int64_t support = 0;  // count(pr), number of records tagged with the role
};

// Accuracy of always predicting the most frequent label: max label count /
// total. DataError on an empty split.
double majority_baseline(const DatasetSplit& split);

// The most frequent label of a split / tagged split. Exact ties resolve to
// NOT_ENTAILED for determinism.
Label majority_label(const DatasetSplit& split);
Label majority_label(const TaggedSplit& tagged);

// One entry per role with support > 0, in inventory order. Within-role ties
// report maj_pr 0.5 with the tagged split's global majority label.
std::vector<ProtoRoleBiasEntry> proto_role_bias(const TaggedSplit& tagged);

// Support-weighted average of maj_pr: sum(maj_pr * support) / sum(support).
// Equals the PRBM's training-set accuracy when the training data had no
// unmatched records and no within-role ties.
double overall_proto_role_bias(std::span<const ProtoRoleBiasEntry> entries);

// Lookup model: for each proto-role, predict the training-set majority label
// of that role. Roles unseen in training and UNMATCHED records get the
// fallback label.
struct PrbmModel {
  std::array<Label, kProtoRoleCount> role_to_label{};
  Label fallback = Label::kNotEntailed;
  std::string trained_on;
};

// Within-role ties map to the fallback. Pass the training split's own
// majority label as fallback to guarantee PRBM training accuracy >= MAJ.
PrbmModel train_prbm(const TaggedSplit& tagged_train, Label fallback);

// Accuracy over all records; UNMATCHED records are predicted with the
// fallback and included in the denominator.
double evaluate_prbm(const PrbmModel& model, const TaggedSplit& tagged);

// Per-role accuracy of the model's label: the share of the split's records
// tagged with each role that carry the label the model predicts for it.
// Equals that role's maj_pr on the training split itself; on other splits it
// can fall below 0.5 when the role's majority flipped. Roles without support
// are left empty.
std::array<std::optional<double>, kProtoRoleCount> evaluate_prbm_per_role(
    const PrbmModel& model, const TaggedSplit& tagged);

struct BiasSummary {
  double maj = 0.0;
  double prbm_accuracy = 0.0;
  std::vector<ProtoRoleBiasEntry> per_role;
  double overall_bias = 0.0;
  std::int64_t total = 0;
};

}  // namespace nliaudit

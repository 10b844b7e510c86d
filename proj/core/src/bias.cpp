#include "nliaudit/bias.hpp"

#include <algorithm>

#include "nliaudit/errors.hpp"

namespace nliaudit {

namespace {

Label majority_of(std::int64_t entailed, std::int64_t not_entailed) {
  if (entailed > not_entailed) return Label::kEntailed;
  return Label::kNotEntailed;  // ties resolve to not-entailed
}

}  // namespace

double majority_baseline(const DatasetSplit& split) {
  if (split.records.empty())
    throw DataError("bias", "majority baseline of an empty split");
  LabelCounts c = split.label_counts();
  return static_cast<double>(std::max(c.entailed, c.not_entailed)) /
         static_cast<double>(c.total());
}

Label majority_label(const DatasetSplit& split) {
  LabelCounts c = split.label_counts();
  return majority_of(c.entailed, c.not_entailed);
}

Label majority_label(const TaggedSplit& tagged) {
  std::int64_t entailed = 0;
  for (Label l : tagged.labels)
    if (l == Label::kEntailed) ++entailed;
  return majority_of(entailed, static_cast<std::int64_t>(tagged.labels.size()) - entailed);
}

std::vector<ProtoRoleBiasEntry> proto_role_bias(const TaggedSplit& tagged) {
  if (tagged.matched() == 0)
    throw DataError("bias", "no matched records; per-role bias undefined");

  std::array<std::array<std::int64_t, kLabelCount>, kProtoRoleCount> counts{};
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    if (!tagged.tags[i]) continue;
    ++counts[role_index(*tagged.tags[i])][label_index(tagged.labels[i])];
  }

  const Label global = majority_label(tagged);
  std::vector<ProtoRoleBiasEntry> entries;
  for (ProtoRole role : all_proto_roles()) {
    const auto& c = counts[role_index(role)];
    std::int64_t support = c[0] + c[1];
    if (support == 0) continue;
    ProtoRoleBiasEntry e;
    e.role = role;
    e.support = support;
    std::int64_t entailed = c[label_index(Label::kEntailed)];
    std::int64_t not_entailed = c[label_index(Label::kNotEntailed)];
    if (entailed == not_entailed)
      e.majority_label = global;
    else
      e.majority_label = entailed > not_entailed ? Label::kEntailed : Label::kNotEntailed;
    e.maj_pr = static_cast<double>(std::max(entailed, not_entailed)) /
               static_cast<double>(support);
    entries.push_back(e);
  }
  return entries;
}

double overall_proto_role_bias(std::span<const ProtoRoleBiasEntry> entries) {
  if (entries.empty())
    throw DataError("bias", "overall proto-role bias of an empty entry list");
  double weighted = 0.0;
  std::int64_t total = 0;
  for (const auto& e : entries) {
    weighted += e.maj_pr * static_cast<double>(e.support);
    total += e.support;
  }
  return weighted / static_cast<double>(total);
}

PrbmModel train_prbm(const TaggedSplit& tagged_train, Label fallback) {
  if (tagged_train.size() == 0)
    throw DataError("bias", "cannot train on an empty tagged split");

  std::array<std::array<std::int64_t, kLabelCount>, kProtoRoleCount> counts{};
  for (std::size_t i = 0; i < tagged_train.size(); ++i) {
    if (!tagged_train.tags[i]) continue;
    ++counts[role_index(*tagged_train.tags[i])][label_index(tagged_train.labels[i])];
  }

  PrbmModel model;
  model.fallback = fallback;
  model.trained_on = tagged_train.split_name;
  for (ProtoRole role : all_proto_roles()) {
    const auto& c = counts[role_index(role)];
    std::int64_t entailed = c[label_index(Label::kEntailed)];
    std::int64_t not_entailed = c[label_index(Label::kNotEntailed)];
    if (entailed == not_entailed)  // covers unseen roles (0 == 0) and ties
      model.role_to_label[role_index(role)] = fallback;
    else
      model.role_to_label[role_index(role)] =
          entailed > not_entailed ? Label::kEntailed : Label::kNotEntailed;
  }
  return model;
}

double evaluate_prbm(const PrbmModel& model, const TaggedSplit& tagged) {
  if (tagged.size() == 0)
    throw DataError("bias", "cannot evaluate on an empty tagged split");
  std::int64_t correct = 0;
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    Label predicted = tagged.tags[i] ? model.role_to_label[role_index(*tagged.tags[i])]
                                     : model.fallback;
    if (predicted == tagged.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(tagged.size());
}

std::array<std::optional<double>, kProtoRoleCount> evaluate_prbm_per_role(
    const PrbmModel& model, const TaggedSplit& tagged) {
  std::array<std::int64_t, kProtoRoleCount> correct{};
  std::array<std::int64_t, kProtoRoleCount> support{};
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    if (!tagged.tags[i]) continue;
    std::size_t r = role_index(*tagged.tags[i]);
    ++support[r];
    if (model.role_to_label[r] == tagged.labels[i]) ++correct[r];
  }
  std::array<std::optional<double>, kProtoRoleCount> accuracy;
  for (std::size_t r = 0; r < kProtoRoleCount; ++r)
    if (support[r] > 0)
      accuracy[r] = static_cast<double>(correct[r]) / static_cast<double>(support[r]);
  return accuracy;
}

}  // namespace nliaudit

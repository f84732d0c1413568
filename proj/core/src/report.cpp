#include "physr/report.hpp"

#include <fstream>

#include "json.hpp"
#include "physr/errors.hpp"
#include "physr/ply.hpp"

namespace physr::report {
namespace {

using nlohmann::ordered_json;

ordered_json timings_json(const StageTimings& t) {
  ordered_json j;
  j["ingest_s"] = t.ingest;
  j["fusion_s"] = t.fusion;
  j["inference_s"] = t.inference;
  j["total_s"] = t.total();
  j["end_to_end_s"] = t.end_to_end;
  ordered_json detail = ordered_json::array();
  for (const auto& s : t.detail) detail.push_back({{"stage", s.stage}, {"step", s.name}, {"seconds", s.seconds}});
  j["detail"] = std::move(detail);
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << text;
  if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace

std::string report_json(const PropertyReport& r) {
  ordered_json j;
  j["scene_id"] = r.scene_id;
  const auto& e = r.estimate;
  j["mass_kg"] = {{"value", e.mass_kg}, {"min", e.mass_range.lo}, {"max", e.mass_range.hi}};
  if (r.ground_truth_mass_kg) j["ground_truth_mass_kg"] = *r.ground_truth_mass_kg;
  ordered_json per = ordered_json::array();
  for (const auto& m : e.per_material) per.push_back({{"material", m.name}, {"mass_kg", m.mass_kg}});
  j["per_material"] = std::move(per);
  j["center_of_mass_m"] = {e.center_of_mass.x(), e.center_of_mass.y(), e.center_of_mass.z()};
  j["b_adap_m"] = e.b_adap;
  j["characteristic_length_m"] = e.characteristic_length;
  j["materials_source"] = r.materials.source;

  std::vector<std::size_t> dominant_counts(r.field.material_count(), 0);
  for (auto d : r.field.dominant) ++dominant_counts[static_cast<std::size_t>(d)];
  ordered_json dominant;
  for (std::size_t m = 0; m < dominant_counts.size(); ++m) dominant[r.field.material_names[m]] = dominant_counts[m];
  j["dominant_material_points"] = std::move(dominant);

  const auto& s = r.stats;
  j["stats"] = {{"cloud_points", s.cloud_points},
                {"views", s.views},
                {"featureless_points", s.featureless_points},
                {"source_points", s.source_points},
                {"voxel_size_m", s.voxel_size},
                {"widen_steps", s.widen_steps},
                {"sources_without_view", s.sources_without_view},
                {"patch_requests", s.patch_requests},
                {"provider_calls", s.provider_calls},
                {"visible_pairs", s.visible_pairs},
                {"visibility_epsilon_m", s.visibility_epsilon},
                {"metric_scale_applied", s.metric_scale_applied},
                {"applied_scale", s.applied_scale},
                {"borrowed_features", r.field.borrowed_features}};
  j["timings"] = timings_json(r.timings);
  return j.dump(2) + "\n";
}

void write_field_ply(const std::filesystem::path& path, const densify::PropertyField& field) {
  std::vector<io::PlyColumn> columns;
  for (int axis = 0; axis < 3; ++axis) {
    std::vector<float> v(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) v[i] = field.positions[i][axis];
    columns.push_back({std::string(1, "xyz"[axis]), std::move(v)});
  }
  columns.push_back({"material", field.dominant});
  for (const auto& [name, values] : field.properties) {
    std::vector<float> mid(values.size());
    std::vector<float> lo(values.size());
    std::vector<float> hi(values.size());
    bool any_range = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      mid[i] = static_cast<float>(values[i].mid());
      lo[i] = static_cast<float>(values[i].lo);
      hi[i] = static_cast<float>(values[i].hi);
      any_range = any_range || values[i].is_range();
    }
    columns.push_back({name, std::move(mid)});
    if (any_range) {
      columns.push_back({name + "_min", std::move(lo)});
      columns.push_back({name + "_max", std::move(hi)});
    }
  }
  io::write_vertex_table_ply(path, columns);
}

void write_run_outputs(const std::filesystem::path& dir, const PropertyReport& report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), ec.message());
  write_text(dir / kReportName, report_json(report));
  write_field_ply(dir / kFieldName, report.field);
}

std::string bench_json(const bench::BenchReport& r) {
  ordered_json j;
  ordered_json stages;
  for (const auto& [name, s] : r.stages) {
    stages[name] = {{"median_s", s.median}, {"p95_s", s.p95}, {"samples", s.samples}};
  }
  j["stages"] = std::move(stages);
  ordered_json bundles = ordered_json::array();
  for (const auto& b : r.bundles) {
    ordered_json row = {{"scene_id", b.scene_id},
                        {"optimized_patches", b.optimized_patches},
                        {"optimized_fusion_s", b.optimized_fusion_seconds}};
    if (r.has_naive) {
      row["naive_patches"] = b.naive_patches;
      row["naive_fusion_s"] = b.naive_fusion_seconds;
    }
    if (b.predicted_mass_kg) row["predicted_mass_kg"] = *b.predicted_mass_kg;
    if (b.ground_truth_mass_kg) row["ground_truth_mass_kg"] = *b.ground_truth_mass_kg;
    bundles.push_back(std::move(row));
  }
  j["bundles"] = std::move(bundles);
  if (r.has_naive) {
    j["naive_comparison"] = {{"optimized_patches", r.optimized_patches},
                             {"naive_patches", r.naive_patches},
                             {"patch_ratio", r.patch_ratio},
                             {"wall_time_ratio", r.wall_time_ratio}};
  }
  return j.dump(2) + "\n";
}

}  // namespace physr::report

#pragma once

// Work-directory layout, atomic artifact writes and per-stage manifests.
//
//   corpus.jsonl            ingest
//   ingest_stats.json       ingest
//   doc2vec.d2v             train-doc2vec
//   meta_dataset.jsonl      build-meta-dataset
//   meta_rouge.jsonl        build-meta-dataset (per-engine ROUGE F1s)
//   split.json              train-meta
//   models/<name>.msp       train-meta
//   reports/<name>.csv|txt  evaluate
//   manifests/<stage>.json  every stage

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "metasumm/detail/hash.hpp"
#include "metasumm/error.hpp"

namespace metasumm {

namespace fs = std::filesystem;

/// Writes through a sibling temp file and renames it into place, so readers
/// never see a partial artifact.
inline void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + tmp.string() + "' for writing");
    try {
      writer(out);
    } catch (...) {
      out.close();
      fs::remove(tmp);
      throw;
    }
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw DataError("failed to write '" + path.string() + "'");
    }
  }
  fs::rename(tmp, path);
}

inline void write_atomic(const fs::path& path, const std::string& bytes) {
  write_atomic(path, [&](std::ostream& out) { out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())); });
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct WorkDir {
  fs::path root;

  fs::path corpus() const { return root / "corpus.jsonl"; }
  fs::path ingest_stats() const { return root / "ingest_stats.json"; }
  fs::path doc2vec() const { return root / "doc2vec.d2v"; }
  fs::path meta_dataset() const { return root / "meta_dataset.jsonl"; }
  fs::path meta_rouge() const { return root / "meta_rouge.jsonl"; }
  fs::path split() const { return root / "split.json"; }
  fs::path models() const { return root / "models"; }
  fs::path model(const std::string& name) const { return models() / (name + ".msp"); }
  fs::path reports() const { return root / "reports"; }
  fs::path manifests() const { return root / "manifests"; }
  fs::path manifest(const std::string& stage) const { return manifests() / (stage + ".json"); }

  /// Throws MissingArtifactError naming `stage` when `p` does not exist.
  static fs::path require(const fs::path& p, const std::string& stage) {
    if (!fs::exists(p)) throw MissingArtifactError(p.string(), stage);
    return p;
  }
};

struct ArtifactRef {
  std::string path;
  std::string hash;  // FNV-1a of the file bytes
};

inline ArtifactRef artifact_ref(const fs::path& p) { return {p.string(), detail::hash_file(p.string())}; }

struct Manifest {
  std::string stage;
  std::vector<ArtifactRef> inputs;
  std::vector<ArtifactRef> outputs;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  double wall_time_seconds = 0.0;

  std::string config_hash() const { return detail::hash_hex(config.dump()); }
};

inline nlohmann::json to_json(const Manifest& m) {
  auto refs = [](const std::vector<ArtifactRef>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& r : v) a.push_back({{"path", r.path}, {"hash", r.hash}});
    return a;
  };
  return {{"stage", m.stage},
          {"inputs", refs(m.inputs)},
          {"outputs", refs(m.outputs)},
          {"config", m.config},
          {"config_hash", m.config_hash()},
          {"seed", m.seed},
          {"wall_time_seconds", m.wall_time_seconds}};
}

inline Manifest manifest_from_json(const nlohmann::json& j) {
  Manifest m;
  try {
    m.stage = j.at("stage").get<std::string>();
    for (const auto& r : j.at("inputs")) m.inputs.push_back({r.at("path"), r.at("hash")});
    for (const auto& r : j.at("outputs")) m.outputs.push_back({r.at("path"), r.at("hash")});
    m.config = j.at("config");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

inline Manifest read_manifest(const fs::path& p) {
  try {
    return manifest_from_json(nlohmann::json::parse(read_file(p)));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("malformed manifest '" + p.string() + "': " + e.what());
  }
}

/// Times a stage and records its manifest once the outputs exist.
class StageRecorder {
 public:
  StageRecorder(WorkDir dir, std::string stage, nlohmann::json config, std::uint64_t seed)
      : dir_(std::move(dir)), start_(std::chrono::steady_clock::now()) {
    m_.stage = std::move(stage);
    m_.config = std::move(config);
    m_.seed = seed;
  }

  void input(const fs::path& p) { m_.inputs.push_back(artifact_ref(p)); }
  void output(const fs::path& p) { m_.outputs.push_back(artifact_ref(p)); }

  Manifest finish() {
    m_.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_atomic(dir_.manifest(m_.stage), to_json(m_).dump(2) + "\n");
    return m_;
  }

 private:
  WorkDir dir_;
  Manifest m_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace metasumm

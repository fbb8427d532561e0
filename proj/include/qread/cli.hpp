#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qread {

// Series CSV plumbing: header row mandatory, LF endings, 17 significant
// digits for doubles formatted through format_cell.
void write_series_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);
std::vector<std::vector<std::string>> read_series_csv(const std::string& path,
                                                      std::vector<std::string>* header);
std::string format_cell(double v);

uint64_t fnv1a_file(const std::string& path);

// Every run writes a manifest alongside its outputs; re-running the stored
// command reproduces the outputs byte-for-byte.
struct RunManifest {
    std::vector<std::string> argv;
    std::string config_json;  // resolved configuration, defaults materialized
    uint64_t seed = 0;
    std::string outdir;
    std::map<std::string, uint64_t> checksums;
};
void write_manifest(const std::string& path, const RunManifest& manifest);
RunManifest read_manifest(const std::string& path);

// exit status 0 on success, 2 on usage errors, 1 on runtime failures (which
// also emit a machine-readable error record on stderr)
int dispatch(const std::vector<std::string>& argv);
int dispatch(int argc, char** argv);

}  // namespace qread

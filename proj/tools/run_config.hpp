#pragma once

#include "sparsep/logspec.hpp"
#include "sparsep/separate.hpp"
#include "sparsep/stft.hpp"
#include "sparsep/train.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sparsep::cli
{

/// Every tunable of the pipeline. The pursuit keys apply to training and
/// separation alike; the log transform keeps its own pursuit settings.
struct RunConfig
{
    StftConfig stft{};
    LogTransformConfig log{};
    TrainConfig train{};
    SeparationConfig separation{};
    std::filesystem::path output_dir = ".";

    /// Sets one key from its text value. Throws ConfigError for unknown
    /// keys and malformed values.
    void set(const std::string& key, const std::string& value);
    /// Throws ConfigError when any module rejects its settings.
    void validate() const;
    /// Flat key=value dump in the config file format.
    std::string to_text() const;

    /// Log transform settings for a clip at the given rate.
    LogTransformConfig log_config(int sample_rate_hz) const;
    StftConfig stft_config(int sample_rate_hz) const;
};

struct ConfigKey
{
    std::string name;
    std::string help;
};

/// Keys accepted in config files and as --<key> flags.
const std::vector<ConfigKey>& config_keys();

/// Parses "key = value" lines; '#' starts a comment. Throws ConfigError
/// with the line number on malformed lines.
std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& source = "config");
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Defaults, then the file entries, then the flag entries; validated.
RunConfig resolve_config(const std::map<std::string, std::string>& file_entries,
                         const std::map<std::string, std::string>& flag_entries);

}  // namespace sparsep::cli

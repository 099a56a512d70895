#pragma once

#include <string>

#include <json.hpp>

#include "hrlab/bessel_pair.hpp"
#include "hrlab/catalog.hpp"
#include "hrlab/conditions.hpp"
#include "hrlab/spectrum.hpp"

namespace hrlab::report {

inline constexpr int kSchemaVersion = 1;

// Rounds through 12 significant digits so serialized reports are byte-stable.
double round12(double v);
nlohmann::json num(double v);

nlohmann::json grid_json(const grid::GridSpec& spec);

nlohmann::json certificate_json(const pairs::BesselCertificate& cert,
                                const grid::GridSpec& spec);
nlohmann::json condition_json(const cond::ConditionReport& rep, const std::string& v_text,
                              const std::string& w_text, int n);
nlohmann::json spectral_json(const spectrum::SpectralReport& rep);
nlohmann::json catalog_json(const catalog::CatalogEntry& entry);

std::string spectral_csv(const spectrum::SpectralReport& rep);
std::string spectral_text(const spectrum::SpectralReport& rep);

// Serialization with a trailing newline; keys are emitted sorted.
std::string dump(const nlohmann::json& j);

}  // namespace hrlab::report

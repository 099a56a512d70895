#include "hrlab/report_json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace hrlab::report {

double round12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::strtod(buf, nullptr);
}

nlohmann::json num(double v) { return nlohmann::json(round12(v)); }

nlohmann::json grid_json(const grid::GridSpec& spec) {
    nlohmann::json j;
    j["m"] = spec.m;
    j["rmin"] = num(spec.r_min);
    j["rmax"] = num(spec.r_max);
    j["kind"] = grid::mesh_kind_name(spec.kind);
    return j;
}

namespace {

nlohmann::json num_array(const std::vector<double>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (double x : v) arr.push_back(num(x));
    return arr;
}

}  // namespace

nlohmann::json certificate_json(const pairs::BesselCertificate& cert,
                                const grid::GridSpec& spec) {
    nlohmann::json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "bessel_certificate";
    j["verdict"] = pairs::verdict_name(cert.verdict);
    j["dim"] = cert.dim;
    j["v"] = cert.v_text;
    j["w"] = cert.w_text;
    j["tol"] = num(cert.tol);
    j["form_margin"] = num(cert.form_margin);
    j["form_converged"] = cert.form_converged;
    j["min_phi"] = num(cert.ode.min_phi);
    j["all_positive"] = cert.ode.all_positive;
    j["ode_residual"] = num(cert.ode.residual);
    j["ode_ok"] = cert.ode.ok;
    if (!cert.ode.message.empty()) j["ode_message"] = cert.ode.message;
    j["validated_rmax"] = num(cert.ode.validated_r_max);
    j["grid"] = grid_json(spec);
    {
        // decimated trace
        nlohmann::json r = nlohmann::json::array(), phi = nlohmann::json::array();
        int nsm = static_cast<int>(cert.ode.r.size());
        int stride = std::max(1, nsm / 128);
        for (int i = 0; i < nsm; i += stride) {
            r.push_back(num(cert.ode.r[static_cast<std::size_t>(i)]));
            phi.push_back(num(cert.ode.phi[static_cast<std::size_t>(i)]));
        }
        j["phi_r"] = std::move(r);
        j["phi"] = std::move(phi);
    }
    if (!cert.witness.empty()) {
        j["violating_profile_r"] = num_array(cert.witness_r);
        j["violating_profile"] = num_array(cert.witness);
    }
    return j;
}

nlohmann::json condition_json(const cond::ConditionReport& rep, const std::string& v_text,
                              const std::string& w_text, int n) {
    nlohmann::json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "condition_report";
    j["id"] = cond::condition_cli_name(rep.id);
    j["n"] = n;
    j["v"] = v_text;
    if (!w_text.empty()) j["w"] = w_text;
    j["holds"] = rep.holds;
    j["tol"] = num(rep.tol);
    j["samples"] = rep.samples;
    if (rep.integral) {
        j["margin"] = num(rep.margin);
        if (!rep.witness.empty()) {
            j["witness_r"] = num_array(rep.witness_r);
            j["witness"] = num_array(rep.witness);
        }
    } else {
        j["worst_r"] = num(rep.worst_r);
        j["worst_value"] = num(rep.worst_value);
        j["normalized_violation"] = num(rep.normalized_violation);
    }
    return j;
}

nlohmann::json spectral_json(const spectrum::SpectralReport& rep) {
    nlohmann::json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "spectral_report";
    j["problem"] = spectrum::problem_cli_name(rep.problem);
    j["n"] = rep.n;
    j["v"] = rep.v_text;
    j["w"] = rep.w_text;
    j["margin_mode"] = rep.margin_mode;
    j["grid"] = grid_json(rep.grid_spec);
    nlohmann::json modes = nlohmann::json::array();
    for (const auto& m : rep.modes) {
        nlohmann::json mj;
        mj["k"] = m.k;
        if (m.failed) {
            mj["failed"] = true;
            mj["error"] = m.error;
        } else {
            mj["value"] = num(m.value);
            mj["converged"] = m.converged;
            mj["sensitivity"] = num(m.sensitivity);
        }
        modes.push_back(std::move(mj));
    }
    j["modes"] = std::move(modes);
    j["argmin_k"] = rep.argmin_k;
    j["global_value"] = num(rep.global_value);
    j["radial_optimal"] = rep.radial_optimal;
    return j;
}

nlohmann::json catalog_json(const catalog::CatalogEntry& entry) {
    nlohmann::json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "catalog_entry";
    j["name"] = entry.name;
    j["v"] = entry.v.to_string();
    j["w"] = entry.w.to_string();
    j["dim"] = entry.dim;
    j["dim_kind"] = entry.dim_kind;
    j["n"] = entry.domain.dim;
    if (entry.domain.finite())
        j["domain_r"] = num(entry.domain.radius);
    else
        j["domain_r"] = "inf";
    return j;
}

std::string spectral_csv(const spectrum::SpectralReport& rep) {
    std::string out = "problem,N,k,value,converged,sensitivity\n";
    char buf[160];
    for (const auto& m : rep.modes) {
        if (m.failed) {
            std::snprintf(buf, sizeof(buf), "%s,%d,%d,nan,false,nan\n",
                          spectrum::problem_cli_name(rep.problem), rep.n, m.k);
        } else {
            std::snprintf(buf, sizeof(buf), "%s,%d,%d,%.12g,%s,%.12g\n",
                          spectrum::problem_cli_name(rep.problem), rep.n, m.k, round12(m.value),
                          m.converged ? "true" : "false", round12(m.sensitivity));
        }
        out += buf;
    }
    return out;
}

std::string spectral_text(const spectrum::SpectralReport& rep) {
    char buf[200];
    std::snprintf(buf, sizeof(buf), "problem %s  N=%d  %s\n",
                  spectrum::problem_cli_name(rep.problem), rep.n,
                  rep.margin_mode ? "margins" : "best constants");
    std::string out = buf;
    for (const auto& m : rep.modes) {
        if (m.failed) {
            std::snprintf(buf, sizeof(buf), "%d failed (%s)\n", m.k, m.error.c_str());
        } else {
            std::snprintf(buf, sizeof(buf), "%d %.12g%s\n", m.k, round12(m.value),
                          m.converged ? "" : " (unconverged)");
        }
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "argmin k=%d  global %.12g  radial_optimal=%s\n", rep.argmin_k,
                  round12(rep.global_value), rep.radial_optimal ? "true" : "false");
    out += buf;
    return out;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace hrlab::report

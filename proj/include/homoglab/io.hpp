#pragma once

// Artifact serialization: atomic text writes, the UFIELD v1 dump format,
// and JSON fragments for the audit-v1 reports and sweep tables.

#include <string>

#include <json.hpp>

#include "homoglab/audit.hpp"
#include "homoglab/cell.hpp"
#include "homoglab/pde.hpp"

namespace homoglab {

// write to <path>.tmp then rename, so readers never observe partial files
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// %.17g: shortest exact round-trip for doubles, byte-stable across runs
std::string fmt(double v);

void dump_ufield(const std::string& path, const DiscreteField& u);
DiscreteField load_ufield(const std::string& path);

// corrector dump: text header + row-major values per direction
std::string corrector_text(const Corrector& c, const std::string& field_desc);
void dump_corrector(const std::string& path, const Corrector& c, const std::string& field_desc);

nlohmann::json tensor_to_json(const HomogenizedTensor& t);
nlohmann::json audit_to_json(const AuditReport& rep);
nlohmann::json sweep_to_json(const SweepResult& s);
std::string sweep_to_csv(const SweepResult& s);
nlohmann::json chain_to_json(const ChainReport& chain);
std::string chain_to_csv(const ChainReport& chain);

}  // namespace homoglab

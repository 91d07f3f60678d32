#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hplb/counting.hpp"
#include "hplb/estimators.hpp"
#include "hplb/experiments.hpp"

namespace hplb {

/// Parsers for the CSV dataset formats. A header row is required; data rows
/// are numbered from 1 in error messages (the header is row 0).
///
///   two-sample : score,label          label in {0,1}
///   ordered    : t,score
///   multiclass : label,p_1,...,p_K    label in {0..K-1}, rows sum to 1 +- 1e-6
LabeledScores parse_two_sample(std::istream& in, std::uint64_t tie_seed = 0);
std::vector<OrderedObservation> parse_ordered(std::istream& in);
MulticlassTable parse_multiclass(std::istream& in);

/// Opens path for reading; ParameterError when that fails.
std::string read_text_file(const std::string& path);

/// 6 fixed decimals, '.' separator, locale independent. NaN prints as "nan".
std::string fixed6(double x);
/// Shortest representation that parses back to the same double.
std::string round_trip(double x);

// CSV emitters. Column orders:
//   HPLBResult        method,alpha,value
//   PowerGridResult   gamma,N,freq,mean_lambda
//   SplitScanResult   s,m,n,value
//   pairwise matrix   i,j,value
//   level study       example,method,lambda,N,alpha,reps,freq
//   simulate summary  example,N,gamma,c,parameter,true_lambda
//   dataset           score,label
//   ordered dataset   t,score
//   multiclass data   label,p1,...,pK
std::string to_csv(const HPLBResult& r);
std::string to_csv(const PowerGridResult& r);
std::string to_csv(const SplitScanResult& r);
std::string matrix_to_csv(const std::vector<std::vector<double>>& matrix);
std::string dataset_to_csv(const LabeledScores& data);
std::string ordered_to_csv(const std::vector<OrderedObservation>& data);
std::string multiclass_to_csv(const MulticlassTable& table);

struct LevelRecord {
  ExampleId example = ExampleId::one;
  Method method = Method::adapt;
  double lambda = 0.0;
  int N = 0;
  double alpha = 0.05;
  int reps = 0;
  double freq = 0.0;
};
std::string to_csv(const LevelRecord& r);

struct SimulateRecord {
  ExampleId example = ExampleId::one;
  int N = 0;
  double gamma = 0.0;  // NaN when the strength was given directly
  double c = 1.0;
  double parameter = 0.0;
  double true_lambda = 0.0;
};
std::string to_csv(const SimulateRecord& r);

// JSON emitters mirror the field names of the result types. NaN becomes null.
std::string to_json(const HPLBResult& r);
std::string to_json(const PowerGridResult& r);
std::string to_json(const SplitScanResult& r);
std::string matrix_to_json(const std::vector<std::vector<double>>& matrix);
std::string to_json(const LevelRecord& r);
std::string to_json(const SimulateRecord& r);

PowerGridResult power_grid_from_json(const std::string& text);
HPLBResult hplb_result_from_json(const std::string& text);

}  // namespace hplb

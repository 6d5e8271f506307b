#ifndef MORKIT_TOUCHSTONE_HPP
#define MORKIT_TOUCHSTONE_HPP

#include <string>

#include "morkit/analysis.hpp"

namespace morkit {

/// Writes a Touchstone v1 file ("# HZ S RI R <z0>"). For two ports the data
/// order is the v1 convention S11 S21 S12 S22; for three or more ports each
/// matrix row starts a new line with at most four complex pairs per line.
/// The conventional extension for p ports is .s<p>p.
void write_touchstone(const std::string& path, const SParameterSet& sparams);

/// "name.s2p" etc. for the given port count.
std::string touchstone_filename(const std::string& stem, Eigen::Index ports);

}  // namespace morkit

#endif  // MORKIT_TOUCHSTONE_HPP

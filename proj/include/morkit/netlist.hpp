#ifndef MORKIT_NETLIST_HPP
#define MORKIT_NETLIST_HPP

#include <istream>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace morkit {

/// Node index for the ground node "0". Ground is excluded from the node set.
inline constexpr int kGround = -1;

struct Resistor {
  std::string name;
  int node_a, node_b;
  double ohms;
};

struct Capacitor {
  std::string name;
  int node_a, node_b;
  double farads;
};

struct Inductor {
  std::string name;
  int node_a, node_b;
  double henries;
};

struct MutualInductor {
  std::string name;
  int inductor_a, inductor_b;  // indices into the inductor list
  double henries;              // mutual inductance, |M| < sqrt(La*Lb)
};

struct Port {
  std::string name;
  int node;
};

/// Element-level description of a passive RLCk network. Nodes are interned in
/// first-appearance order; node 0 is ground and is represented as kGround.
/// Element order is preserved as written.
class RlckNetlist {
 public:
  /// Returns the index of the node, interning it on first sight ("0" maps to
  /// kGround and is never interned).
  int intern_node(const std::string& id);

  void add_resistor(const std::string& name, const std::string& node_a,
                    const std::string& node_b, double ohms);
  void add_capacitor(const std::string& name, const std::string& node_a,
                     const std::string& node_b, double farads);
  void add_inductor(const std::string& name, const std::string& node_a,
                    const std::string& node_b, double henries);
  /// Both named inductors must already be defined.
  void add_mutual(const std::string& name, const std::string& inductor_a,
                  const std::string& inductor_b, double henries);
  void add_port(const std::string& name, const std::string& node);

  /// Cross-element invariants: every port node appears in at least one
  /// element. Per-element invariants are enforced by the add_* calls.
  void validate() const;

  int node_count() const { return static_cast<int>(node_names_.size()); }
  const std::vector<std::string>& node_names() const { return node_names_; }
  const std::string& node_name(int index) const { return node_names_.at(index); }

  const std::vector<Resistor>& resistors() const { return resistors_; }
  const std::vector<Capacitor>& capacitors() const { return capacitors_; }
  const std::vector<Inductor>& inductors() const { return inductors_; }
  const std::vector<MutualInductor>& mutual_inductors() const {
    return mutuals_;
  }
  const std::vector<Port>& ports() const { return ports_; }

 private:
  void claim_name(const std::string& name);
  void note_element_on(int node);

  std::vector<std::string> node_names_;
  std::unordered_map<std::string, int> node_index_;
  std::unordered_map<std::string, int> inductor_index_;
  std::set<std::string> names_;
  std::set<std::pair<int, int>> mutual_pairs_;
  std::vector<int> node_degree_;  // element terminals touching each node

  std::vector<Resistor> resistors_;
  std::vector<Capacitor> capacitors_;
  std::vector<Inductor> inductors_;
  std::vector<MutualInductor> mutuals_;
  std::vector<Port> ports_;
};

/// Parses the line-oriented SPICE-like netlist format:
///
///   R<name> <node_a> <node_b> <ohms>
///   C<name> <node_a> <node_b> <farads>
///   L<name> <node_a> <node_b> <henries>
///   K<name> <Lname_a> <Lname_b> <mutual henries>
///   P<name> <node>
///
/// '*' starts a comment line, node "0" is ground, values are plain decimal
/// or scientific notation (no unit suffixes). K lines may reference
/// inductors defined later in the file.
RlckNetlist parse_netlist(std::istream& in);
RlckNetlist parse_netlist(const std::string& text);

}  // namespace morkit

#endif  // MORKIT_NETLIST_HPP

#include <algorithm>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "molcurr/element.hpp"
#include "molcurr/smiles.hpp"

namespace molcurr {
namespace {

constexpr int kUnvisited = -1;

class Writer {
 public:
  explicit Writer(const MolecularGraph &g)
      : g_(g), visit_rank_(g.num_atoms(), kUnvisited), parent_bond_(g.num_atoms(), UINT32_MAX) {}

  std::string run() {
    std::string out;
    for (AtomIndex start = 0; start < g_.num_atoms(); ++start) {
      if (visit_rank_[start] != kUnvisited) continue;
      build_tree(start);
      if (!out.empty()) out += '.';
      emit(start, out);
    }
    return out;
  }

 private:
  // Iterative DFS assigning visit ranks, tree edges and ring-closure edges.
  void build_tree(AtomIndex root) {
    std::vector<std::pair<AtomIndex, std::size_t>> stack{{root, 0}};
    visit_rank_[root] = next_rank_++;
    while (!stack.empty()) {
      auto &[atom, cursor] = stack.back();
      const auto nbs = g_.neighbors(atom);
      if (cursor == nbs.size()) {
        stack.pop_back();
        continue;
      }
      const Neighbor nb = nbs[cursor++];
      if (nb.bond == parent_bond_[atom]) continue;
      if (visit_rank_[nb.atom] == kUnvisited) {
        visit_rank_[nb.atom] = next_rank_++;
        parent_bond_[nb.atom] = nb.bond;
        stack.push_back({nb.atom, 0});
      } else if (visit_rank_[nb.atom] < visit_rank_[atom]) {
        closures_.push_back(nb.bond);
      }
    }
  }

  void emit(AtomIndex atom, std::string &out) {
    write_atom(g_.atom(atom), out);

    // Ring bonds: open at the earlier-visited end, close at the later.
    std::vector<BondIndex> here;
    for (const auto &nb : g_.neighbors(atom)) {
      if (std::find(closures_.begin(), closures_.end(), nb.bond) != closures_.end())
        here.push_back(nb.bond);
    }
    std::sort(here.begin(), here.end(), [&](BondIndex a, BondIndex b) {
      return visit_rank_[g_.bond(a).other(atom)] < visit_rank_[g_.bond(b).other(atom)];
    });
    for (BondIndex bi : here) {
      const AtomIndex other = g_.bond(bi).other(atom);
      if (visit_rank_[other] > visit_rank_[atom]) {
        const int digit = allocate_digit();
        open_digits_.push_back({bi, digit});
        write_bond(bi, atom, other, out);
        write_digit(digit, out);
      } else {
        auto it = std::find_if(open_digits_.begin(), open_digits_.end(),
                               [&](const auto &p) { return p.first == bi; });
        write_digit(it->second, out);
        in_use_[it->second] = false;
        open_digits_.erase(it);
      }
    }

    std::vector<AtomIndex> children;
    for (const auto &nb : g_.neighbors(atom)) {
      if (parent_bond_[nb.atom] == nb.bond && nb.atom != atom &&
          visit_rank_[nb.atom] > visit_rank_[atom])
        children.push_back(nb.atom);
    }
    std::sort(children.begin(), children.end(),
              [&](AtomIndex a, AtomIndex b) { return visit_rank_[a] < visit_rank_[b]; });
    for (std::size_t i = 0; i < children.size(); ++i) {
      const bool branch = i + 1 < children.size();
      if (branch) out += '(';
      write_bond(parent_bond_[children[i]], atom, children[i], out);
      emit(children[i], out);
      if (branch) out += ')';
    }
  }

  int allocate_digit() {
    for (int d = 1; d < 100; ++d) {
      if (!in_use_[d]) {
        in_use_[d] = true;
        return d;
      }
    }
    // More than 99 simultaneously open rings cannot be written.
    throw std::length_error("too many open ring bonds for SMILES output");
  }

  static void write_digit(int d, std::string &out) {
    if (d < 10)
      out += static_cast<char>('0' + d);
    else
      out += fmt::format("%{:02d}", d);
  }

  void write_bond(BondIndex bi, AtomIndex from, AtomIndex to, std::string &out) const {
    const Bond &b = g_.bond(bi);
    const bool both_aromatic = g_.atom(from).aromatic && g_.atom(to).aromatic;
    switch (b.order) {
      case BondOrder::Double: out += '='; return;
      case BondOrder::Triple: out += '#'; return;
      case BondOrder::Aromatic: return;
      case BondOrder::Single: break;
    }
    BondStereo stereo = b.stereo;
    if (b.begin != from && stereo != BondStereo::None)
      stereo = stereo == BondStereo::Up ? BondStereo::Down : BondStereo::Up;
    if (stereo == BondStereo::Up)
      out += '/';
    else if (stereo == BondStereo::Down)
      out += '\\';
    else if (both_aromatic)
      out += '-';
  }

  static void write_atom(const Atom &a, std::string &out) {
    std::string symbol(element(a.element).symbol);
    if (a.aromatic) symbol[0] = static_cast<char>(symbol[0] - 'A' + 'a');
    if (!a.bracket) {
      out += symbol;
      return;
    }
    out += '[';
    if (a.isotope) out += std::to_string(*a.isotope);
    out += symbol;
    if (a.chirality == Chirality::At) out += '@';
    if (a.chirality == Chirality::AtAt) out += "@@";
    const int h = a.explicit_h.value_or(0);
    if (h > 0) {
      out += 'H';
      if (h > 1) out += std::to_string(h);
    }
    if (a.formal_charge != 0) {
      out += a.formal_charge > 0 ? '+' : '-';
      const int mag = std::abs(a.formal_charge);
      if (mag > 1) out += std::to_string(mag);
    }
    out += ']';
  }

  const MolecularGraph &g_;
  std::vector<int> visit_rank_;
  std::vector<BondIndex> parent_bond_;
  std::vector<BondIndex> closures_;
  std::vector<std::pair<BondIndex, int>> open_digits_;
  bool in_use_[100] = {};
  int next_rank_ = 0;
};

}  // namespace

std::string write_smiles(const MolecularGraph &graph) { return Writer(graph).run(); }

}  // namespace molcurr

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "molcurr/element.hpp"
#include "molcurr/smiles.hpp"

namespace molcurr {

std::string_view to_string(SmilesErrorKind kind) noexcept {
  switch (kind) {
    case SmilesErrorKind::EmptyInput: return "EmptyInput";
    case SmilesErrorKind::UnexpectedCharacter: return "UnexpectedCharacter";
    case SmilesErrorKind::UnmatchedRingClosure: return "UnmatchedRingClosure";
    case SmilesErrorKind::UnknownElement: return "UnknownElement";
    case SmilesErrorKind::InvalidBracketAtom: return "InvalidBracketAtom";
    case SmilesErrorKind::DanglingBond: return "DanglingBond";
    case SmilesErrorKind::UnbalancedBranch: return "UnbalancedBranch";
    case SmilesErrorKind::DuplicateBond: return "DuplicateBond";
    case SmilesErrorKind::InvalidRingBond: return "InvalidRingBond";
    case SmilesErrorKind::InvalidAromaticBond: return "InvalidAromaticBond";
    case SmilesErrorKind::ValenceExceeded: return "ValenceExceeded";
  }
  return "Unknown";
}

SmilesError::SmilesError(SmilesErrorKind kind, std::size_t offset, const std::string &detail)
    : std::runtime_error(fmt::format("{} at offset {}: {}", to_string(kind), offset, detail)),
      kind_(kind),
      offset_(offset) {}

namespace {

struct PendingBond {
  BondOrder order;
  BondStereo stereo;
  std::size_t offset;
};

struct OpenRing {
  AtomIndex atom;
  std::optional<PendingBond> bond;
  std::size_t offset;
};

struct BranchFrame {
  AtomIndex atom;
  std::size_t offset;
  std::size_t atoms_at_open;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  MolecularGraph run() {
    if (text_.empty()) fail(SmilesErrorKind::EmptyInput, 0, "empty SMILES");
    while (pos_ < text_.size()) step();
    finish();
    assign_hydrogens();
    return MolecularGraph(std::move(atoms_), std::move(bonds_), std::string(text_));
  }

 private:
  [[noreturn]] void fail(SmilesErrorKind kind, std::size_t at, const std::string &what) const {
    throw SmilesError(kind, at, what);
  }

  void step() {
    const char c = text_[pos_];
    switch (c) {
      case '(': open_branch(); return;
      case ')': close_branch(); return;
      case '-': bond_symbol(BondOrder::Single, BondStereo::None); return;
      case '=': bond_symbol(BondOrder::Double, BondStereo::None); return;
      case '#': bond_symbol(BondOrder::Triple, BondStereo::None); return;
      case ':': bond_symbol(BondOrder::Aromatic, BondStereo::None); return;
      case '/': bond_symbol(BondOrder::Single, BondStereo::Up); return;
      case '\\': bond_symbol(BondOrder::Single, BondStereo::Down); return;
      case '.': dot(); return;
      case '%': ring_closure(); return;
      case '[': bracket_atom(); return;
      default: break;
    }
    if (is_digit(c)) {
      ring_closure();
      return;
    }
    organic_atom();
  }

  void open_branch() {
    if (!prev_) fail(SmilesErrorKind::UnbalancedBranch, pos_, "branch without a preceding atom");
    if (pending_) fail(SmilesErrorKind::DanglingBond, pending_->offset, "bond before '('");
    branches_.push_back({*prev_, pos_, atoms_.size()});
    ++pos_;
  }

  void close_branch() {
    if (branches_.empty()) fail(SmilesErrorKind::UnbalancedBranch, pos_, "unmatched ')'");
    if (pending_) fail(SmilesErrorKind::DanglingBond, pending_->offset, "bond before ')'");
    const auto frame = branches_.back();
    branches_.pop_back();
    if (atoms_.size() == frame.atoms_at_open || !prev_)
      fail(SmilesErrorKind::UnbalancedBranch, frame.offset, "empty branch");
    prev_ = frame.atom;
    ++pos_;
  }

  void bond_symbol(BondOrder order, BondStereo stereo) {
    if (!prev_) fail(SmilesErrorKind::DanglingBond, pos_, "bond without a preceding atom");
    if (pending_) fail(SmilesErrorKind::DanglingBond, pending_->offset, "consecutive bond symbols");
    pending_ = PendingBond{order, stereo, pos_};
    ++pos_;
  }

  void dot() {
    if (!prev_) fail(SmilesErrorKind::UnexpectedCharacter, pos_, "'.' without a preceding atom");
    if (pending_) fail(SmilesErrorKind::DanglingBond, pending_->offset, "bond before '.'");
    prev_.reset();
    dot_offset_ = pos_;
    ++pos_;
  }

  void ring_closure() {
    const std::size_t start = pos_;
    int number = 0;
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= text_.size() || !is_digit(text_[pos_ + 1]) || !is_digit(text_[pos_ + 2]))
        fail(SmilesErrorKind::UnexpectedCharacter, start, "'%' must be followed by two digits");
      number = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      number = text_[pos_] - '0';
      ++pos_;
    }
    if (!prev_) fail(SmilesErrorKind::UnexpectedCharacter, start, "ring bond without an atom");

    auto &slot = rings_[number];
    if (!slot) {
      slot = OpenRing{*prev_, pending_, start};
      pending_.reset();
      return;
    }
    const OpenRing open = *slot;
    slot.reset();
    if (open.atom == *prev_)
      fail(SmilesErrorKind::InvalidRingBond, start, "ring bond closes on the same atom");

    std::optional<PendingBond> bond = open.bond;
    if (pending_) {
      if (bond && (bond->order != pending_->order || bond->stereo != pending_->stereo)) {
        // '/' at one end and '\' at the other describe the same direction.
        const bool stereo_pair = bond->order == BondOrder::Single &&
                                 pending_->order == BondOrder::Single &&
                                 bond->stereo != BondStereo::None &&
                                 pending_->stereo != BondStereo::None &&
                                 bond->stereo != pending_->stereo;
        if (!stereo_pair)
          fail(SmilesErrorKind::InvalidRingBond, pending_->offset, "conflicting ring bond symbols");
      }
      if (!bond) {
        // Written at the closing end: direction is closing -> opening.
        PendingBond flipped = *pending_;
        if (flipped.stereo == BondStereo::Up)
          flipped.stereo = BondStereo::Down;
        else if (flipped.stereo == BondStereo::Down)
          flipped.stereo = BondStereo::Up;
        bond = flipped;
      }
      pending_.reset();
    }
    add_bond(open.atom, *prev_, bond, start);
  }

  void add_bond(AtomIndex a, AtomIndex b, const std::optional<PendingBond> &spec, std::size_t at,
                bool check_duplicate = true) {
    for (const auto &existing : check_duplicate ? std::span<const Bond>(bonds_) : std::span<const Bond>()) {
      if ((existing.begin == a && existing.end == b) || (existing.begin == b && existing.end == a))
        fail(SmilesErrorKind::DuplicateBond, at, "atoms already bonded");
    }
    Bond bond;
    bond.begin = a;
    bond.end = b;
    if (spec) {
      bond.order = spec->order;
      bond.stereo = spec->stereo;
    } else {
      bond.order = (atoms_[a].aromatic && atoms_[b].aromatic) ? BondOrder::Aromatic
                                                              : BondOrder::Single;
    }
    bond_offsets_.push_back(spec ? spec->offset : at);
    bonds_.push_back(bond);
  }

  void attach(Atom atom, std::size_t at) {
    atom.index = static_cast<AtomIndex>(atoms_.size());
    atoms_.push_back(atom);
    atom_offsets_.push_back(at);
    const AtomIndex idx = atom.index;
    if (prev_) add_bond(*prev_, idx, pending_, at, false);
    pending_.reset();
    prev_ = idx;
    dot_offset_.reset();
  }

  void organic_atom() {
    const std::size_t start = pos_;
    const char c = text_[pos_];
    Atom atom;
    std::string_view symbol;
    if (c == 'C' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'l') {
      symbol = "Cl";
    } else if (c == 'B' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'r') {
      symbol = "Br";
    } else {
      switch (c) {
        case 'B': symbol = "B"; break;
        case 'C': symbol = "C"; break;
        case 'N': symbol = "N"; break;
        case 'O': symbol = "O"; break;
        case 'P': symbol = "P"; break;
        case 'S': symbol = "S"; break;
        case 'F': symbol = "F"; break;
        case 'I': symbol = "I"; break;
        case 'b': symbol = "B"; atom.aromatic = true; break;
        case 'c': symbol = "C"; atom.aromatic = true; break;
        case 'n': symbol = "N"; atom.aromatic = true; break;
        case 'o': symbol = "O"; atom.aromatic = true; break;
        case 'p': symbol = "P"; atom.aromatic = true; break;
        case 's': symbol = "S"; atom.aromatic = true; break;
        default:
          if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '*')
            fail(SmilesErrorKind::UnknownElement, start,
                 fmt::format("'{}' is not an organic-subset atom", c));
          fail(SmilesErrorKind::UnexpectedCharacter, start,
               fmt::format("unexpected byte 0x{:02x}", static_cast<unsigned char>(c)));
      }
    }
    atom.element = find_element(symbol)->atomic_number;
    pos_ += symbol.size();
    attach(atom, start);
  }

  void bracket_atom() {
    const std::size_t start = pos_;
    ++pos_;  // '['
    auto bad = [&](const std::string &what) -> void {
      fail(SmilesErrorKind::InvalidBracketAtom, start, what);
    };
    auto at_end = [&] { return pos_ >= text_.size(); };

    Atom atom;
    atom.bracket = true;

    if (!at_end() && is_digit(text_[pos_])) {
      int iso = 0, ndig = 0;
      while (!at_end() && is_digit(text_[pos_])) {
        iso = iso * 10 + (text_[pos_] - '0');
        ++pos_;
        if (++ndig > 3) bad("isotope has more than three digits");
      }
      atom.isotope = static_cast<std::uint16_t>(iso);
    }

    if (at_end()) bad("unterminated bracket atom");
    {
      const char c = text_[pos_];
      const ElementInfo *info = nullptr;
      std::size_t len = 0;
      if (c >= 'A' && c <= 'Z') {
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] >= 'a' && text_[pos_ + 1] <= 'z') {
          info = find_element(text_.substr(pos_, 2));
          if (info) len = 2;
        }
        if (!info) {
          info = find_element(text_.substr(pos_, 1));
          len = 1;
        }
      } else if (c >= 'a' && c <= 'z') {
        static constexpr std::array<std::string_view, 3> kTwoLetter{"se", "as", "te"};
        for (auto s : kTwoLetter) {
          if (text_.substr(pos_, 2) == s) {
            const char up[2] = {static_cast<char>(s[0] - 'a' + 'A'), s[1]};
            info = find_element(std::string_view(up, 2));
            len = 2;
            break;
          }
        }
        if (!info) {
          static constexpr std::string_view kOneLetter = "bcnops";
          if (kOneLetter.find(c) != std::string_view::npos) {
            const char up = static_cast<char>(c - 'a' + 'A');
            info = find_element(std::string_view(&up, 1));
            len = 1;
          }
        }
        atom.aromatic = info != nullptr;
      } else if (c == '*') {
        fail(SmilesErrorKind::UnknownElement, pos_, "wildcard atoms are not supported");
      }
      if (!info) fail(SmilesErrorKind::UnknownElement, pos_, "unknown element symbol");
      atom.element = info->atomic_number;
      pos_ += len;
    }

    if (!at_end() && text_[pos_] == '@') {
      ++pos_;
      atom.chirality = Chirality::At;
      if (!at_end() && text_[pos_] == '@') {
        ++pos_;
        atom.chirality = Chirality::AtAt;
      }
      if (!at_end() && text_[pos_] >= 'A' && text_[pos_] <= 'Z' && text_[pos_] != 'H')
        bad("only @ and @@ chirality classes are supported");
    }

    if (!at_end() && text_[pos_] == 'H') {
      ++pos_;
      int h = 1;
      if (!at_end() && is_digit(text_[pos_])) {
        h = text_[pos_] - '0';
        ++pos_;
        if (!at_end() && is_digit(text_[pos_])) bad("hydrogen count above 9");
      }
      atom.explicit_h = static_cast<std::uint8_t>(h);
    } else {
      atom.explicit_h = 0;
    }

    if (!at_end() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const char sign = text_[pos_];
      ++pos_;
      int magnitude = 1;
      if (!at_end() && is_digit(text_[pos_])) {
        magnitude = text_[pos_] - '0';
        ++pos_;
        if (!at_end() && is_digit(text_[pos_])) bad("charge magnitude above 9");
      } else {
        while (!at_end() && text_[pos_] == sign) {
          ++magnitude;
          ++pos_;
        }
      }
      if (magnitude > 4) bad("formal charge outside [-4, +4]");
      atom.formal_charge = static_cast<std::int8_t>(sign == '+' ? magnitude : -magnitude);
    }

    if (!at_end() && text_[pos_] == ':') {
      ++pos_;
      if (at_end() || !is_digit(text_[pos_])) bad("atom class needs digits");
      int ndig = 0;
      while (!at_end() && is_digit(text_[pos_])) {
        ++pos_;
        if (++ndig > 6) bad("atom class too long");
      }
    }

    if (at_end() || text_[pos_] != ']') bad("expected ']'");
    ++pos_;
    attach(atom, start);
  }

  void finish() {
    if (pending_) fail(SmilesErrorKind::DanglingBond, pending_->offset, "bond at end of input");
    if (!branches_.empty())
      fail(SmilesErrorKind::UnbalancedBranch, branches_.back().offset, "unclosed '('");
    for (const auto &slot : rings_) {
      if (slot) fail(SmilesErrorKind::UnmatchedRingClosure, slot->offset, "ring bond never closed");
    }
    if (dot_offset_) fail(SmilesErrorKind::UnexpectedCharacter, *dot_offset_, "trailing '.'");
    for (std::size_t i = 0; i < bonds_.size(); ++i) {
      const auto &b = bonds_[i];
      if (b.order == BondOrder::Aromatic && !(atoms_[b.begin].aromatic && atoms_[b.end].aromatic))
        fail(SmilesErrorKind::InvalidAromaticBond, bond_offsets_[i],
             "aromatic bond between non-aromatic atoms");
    }
  }

  void assign_hydrogens() {
    std::vector<int> order_sum(atoms_.size(), 0);
    for (const auto &b : bonds_) {
      const int v = b.order == BondOrder::Double ? 2 : b.order == BondOrder::Triple ? 3 : 1;
      order_sum[b.begin] += v;
      order_sum[b.end] += v;
    }
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      auto &atom = atoms_[i];
      const int sum = order_sum[i];
      const int top = max_valence(atom.element, atom.formal_charge);
      if (top < 0) continue;
      if (!atom.bracket) {
        const auto vals = normal_valences(atom.element);
        int h = 0;
        if (atom.aromatic) {
          // One valence unit goes to the delocalised pi bond when it fits;
          // pyrrole-type n/o/s with a full sigma shell take none.
          const int low = vals.front();
          if (sum + 1 <= low)
            h = low - sum - 1;
        } else {
          int target = -1;
          for (int v : vals) {
            if (v >= sum) {
              target = v;
              break;
            }
          }
          if (target >= 0) h = target - sum;
        }
        atom.implicit_h = static_cast<std::uint8_t>(h);
      }
      if (sum + atom.attached_h() > top)
        fail(SmilesErrorKind::ValenceExceeded, atom_offsets_[i],
             fmt::format("valence {} exceeds maximum {} for {}", sum + atom.attached_h(), top,
                         element(atom.element).symbol));
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::size_t> atom_offsets_;
  std::vector<std::size_t> bond_offsets_;
  std::optional<AtomIndex> prev_;
  std::optional<PendingBond> pending_;
  std::optional<std::size_t> dot_offset_;
  std::vector<BranchFrame> branches_;
  std::array<std::optional<OpenRing>, 100> rings_{};
};

}  // namespace

MolecularGraph parse_smiles(std::string_view text) { return Parser(text).run(); }

}  // namespace molcurr

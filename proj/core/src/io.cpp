#include "lincom/io.hpp"

#include <sstream>

namespace lincom {

IntMat parse_matrix(const std::string& text) {
  IntMat M;
  std::stringstream rows_in(text);
  std::string row_text;
  int row_idx = 0;
  while (std::getline(rows_in, row_text, ';')) {
    ++row_idx;
    IntVec row;
    std::istringstream entries(row_text);
    std::string tok;
    int col_idx = 0;
    while (entries >> tok) {
      ++col_idx;
      try {
        row.emplace_back(tok);
      } catch (const std::invalid_argument&) {
        throw Error("ParseError", "row " + std::to_string(row_idx) + ", entry " +
                                      std::to_string(col_idx) +
                                      ": not an integer: '" + tok + "'");
      }
    }
    if (row.empty())
      throw Error("ParseError", "row " + std::to_string(row_idx) + " is empty");
    if (!M.empty() && row.size() != M[0].size())
      throw Error("ParseError",
                  "row " + std::to_string(row_idx) + " has " +
                      std::to_string(row.size()) + " entries, expected " +
                      std::to_string(M[0].size()));
    M.push_back(std::move(row));
  }
  if (M.empty()) throw Error("ParseError", "no rows");
  return M;
}

std::string matrix_to_text(const IntMat& M) {
  std::string out;
  for (size_t i = 0; i < M.size(); ++i) {
    if (i) out += "; ";
    for (size_t j = 0; j < M[i].size(); ++j) {
      if (j) out += ' ';
      out += M[i][j].get_str();
    }
  }
  return out;
}

std::string rat_to_string(const Rat& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace lincom

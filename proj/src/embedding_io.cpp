#include "treebandit/embedding_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "treebandit/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "embedding binary I/O assumes a little-endian host");

namespace treebandit {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

template <typename T>
void write_raw(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in, const std::string& path, const char* what) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw InputError("embedding file " + path + ": truncated while reading " + what);
  return v;
}

std::vector<ItemEmbedding> read_binary(std::istream& in, const std::string& path) {
  char magic[4];
  in.read(magic, 4);
  auto count = read_raw<std::uint32_t>(in, path, "count");
  auto dim = read_raw<std::uint32_t>(in, path, "dimension");
  if (dim == 0) throw InputError("embedding file " + path + ": zero dimension");
  std::vector<ItemEmbedding> items(count);
  std::vector<float> row(dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    items[i].item_id = read_raw<std::uint64_t>(in, path, "record id");
    in.read(reinterpret_cast<char*>(row.data()), std::streamsize(sizeof(float)) * dim);
    if (!in) throw InputError("embedding file " + path + ": truncated record " + std::to_string(i));
    items[i].vector.resize(dim);
    for (std::uint32_t j = 0; j < dim; ++j) items[i].vector[j] = static_cast<double>(row[j]);
  }
  return items;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::vector<ItemEmbedding> read_csv(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("embedding file " + path + ": empty file");
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2 || header[1].empty() || header[1][0] != 'v')
    throw InputError("embedding file " + path + ": expected header id,v1,...,vd");
  const std::size_t dim = header.size() - 1;

  std::vector<ItemEmbedding> items;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != dim + 1)
      throw InputError("embedding file " + path + " line " + std::to_string(lineno) + ": expected " +
                       std::to_string(dim + 1) + " fields, got " + std::to_string(fields.size()));
    ItemEmbedding e;
    try {
      e.item_id = std::stoull(fields[0]);
      e.vector.resize(static_cast<Eigen::Index>(dim));
      for (std::size_t j = 0; j < dim; ++j) {
        // Quantize through f32 so CSV and binary inputs agree bit for bit.
        e.vector[static_cast<Eigen::Index>(j)] =
            static_cast<double>(static_cast<float>(std::stod(fields[j + 1])));
      }
    } catch (const std::exception&) {
      throw InputError("embedding file " + path + " line " + std::to_string(lineno) +
                       ": unparseable field");
    }
    items.push_back(std::move(e));
  }
  return items;
}

}  // namespace

std::vector<ItemEmbedding> read_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("read_embeddings: cannot open " + path);
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  if (!in || in.gcount() < 4) throw InputError("embedding file " + path + ": too short");
  in.seekg(0);
  if (std::memcmp(magic, kMagic, 4) == 0) return read_binary(in, path);
  return read_csv(in, path);
}

void write_embeddings_binary(const std::string& path, const std::vector<ItemEmbedding>& items) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("write_embeddings_binary: cannot open " + path);
  out.write(kMagic, 4);
  write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(items.size()));
  const std::uint32_t dim = items.empty() ? 0 : static_cast<std::uint32_t>(items[0].vector.size());
  write_raw<std::uint32_t>(out, dim);
  for (const ItemEmbedding& e : items) {
    write_raw<std::uint64_t>(out, e.item_id);
    for (Eigen::Index j = 0; j < e.vector.size(); ++j)
      write_raw<float>(out, static_cast<float>(e.vector[j]));
  }
  if (!out) throw InputError("write_embeddings_binary: write failed for " + path);
}

void write_embeddings_csv(const std::string& path, const std::vector<ItemEmbedding>& items,
                          const std::string& id_column) {
  std::ofstream out(path);
  if (!out) throw InputError("write_embeddings_csv: cannot open " + path);
  const Eigen::Index dim = items.empty() ? 0 : items[0].vector.size();
  out << id_column;
  for (Eigen::Index j = 1; j <= dim; ++j) out << ",v" << j;
  out << "\n";
  char buf[32];
  for (const ItemEmbedding& e : items) {
    out << e.item_id;
    for (Eigen::Index j = 0; j < e.vector.size(); ++j) {
      // %.9g round-trips the f32-quantized value exactly.
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(static_cast<float>(e.vector[j])));
      out << ',' << buf;
    }
    out << "\n";
  }
  if (!out) throw InputError("write_embeddings_csv: write failed for " + path);
}

std::map<ItemId, std::string> read_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("read_labels_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw InputError("label file " + path + ": empty file");
  std::map<ItemId, std::string> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 2)
      throw InputError("label file " + path + " line " + std::to_string(lineno) +
                       ": expected item_id,category");
    try {
      labels[std::stoull(fields[0])] = fields[1];
    } catch (const std::exception&) {
      throw InputError("label file " + path + " line " + std::to_string(lineno) + ": bad item id");
    }
  }
  return labels;
}

void write_labels_csv(const std::string& path, const std::map<ItemId, std::string>& labels) {
  std::ofstream out(path);
  if (!out) throw InputError("write_labels_csv: cannot open " + path);
  out << "item_id,category\n";
  for (const auto& [id, label] : labels) out << id << ',' << label << "\n";
  if (!out) throw InputError("write_labels_csv: write failed for " + path);
}

}  // namespace treebandit

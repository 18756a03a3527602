#pragma once

#include <map>
#include <string>
#include <vector>

#include "treebandit/tree.hpp"

namespace treebandit {

// Embedding interchange formats. Values are 32-bit floats in both formats so
// the binary and CSV paths yield bit-identical worlds:
//
//   binary:  magic "EMB1", u32 count, u32 dimension,
//            then count records of (u64 id, dimension little-endian f32)
//   CSV:     header "item_id,v1,...,vd", one row per item
//
// Readers sniff the magic bytes, so any reader accepts either format. CSV
// values are quantized through f32 on load. The same functions serve user
// vectors (the id column is then a user id).

std::vector<ItemEmbedding> read_embeddings(const std::string& path);
void write_embeddings_binary(const std::string& path, const std::vector<ItemEmbedding>& items);
void write_embeddings_csv(const std::string& path, const std::vector<ItemEmbedding>& items,
                          const std::string& id_column = "item_id");

// Category labels, CSV with header (item_id, category).
std::map<ItemId, std::string> read_labels_csv(const std::string& path);
void write_labels_csv(const std::string& path, const std::map<ItemId, std::string>& labels);

}  // namespace treebandit

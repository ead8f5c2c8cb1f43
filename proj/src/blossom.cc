#include "snaq/blossom.h"

#include <algorithm>
#include <stdexcept>

namespace snaq {

namespace {

// Primal-dual search with explicit blossom bookkeeping. Vertices are
// 0..n-1, blossoms n..2n-1. Edge endpoints are numbered 2k and 2k+1 so that
// endpoint p belongs to edge p/2 and p^1 is the opposite end.
class Blossom {
  public:
    Blossom(int n, const std::vector<WeightedEdge> &edges, bool max_card)
        : n_(n), edges_(edges), max_card_(max_card) {}

    std::vector<int> run() {
        int m = (int)edges_.size();
        int64_t maxw = 0;
        for (const auto &e : edges_) {
            if (e.u < 0 || e.v < 0 || e.u >= n_ || e.v >= n_ || e.u == e.v) {
                throw std::invalid_argument("bad edge in matching input");
            }
            maxw = std::max(maxw, e.w);
        }
        endpoint_.resize(2 * m);
        for (int p = 0; p < 2 * m; p++) endpoint_[p] = p % 2 ? edges_[p / 2].v : edges_[p / 2].u;
        neighbend_.assign(n_, {});
        for (int k = 0; k < m; k++) {
            neighbend_[edges_[k].u].push_back(2 * k + 1);
            neighbend_[edges_[k].v].push_back(2 * k);
        }
        mate_.assign(n_, -1);
        label_.assign(2 * n_, 0);
        labelend_.assign(2 * n_, -1);
        inblossom_.resize(n_);
        for (int v = 0; v < n_; v++) inblossom_[v] = v;
        blossomparent_.assign(2 * n_, -1);
        childs_.assign(2 * n_, {});
        endps_.assign(2 * n_, {});
        base_.assign(2 * n_, -1);
        for (int v = 0; v < n_; v++) base_[v] = v;
        bestedge_.assign(2 * n_, -1);
        bestedges_.assign(2 * n_, {});
        has_bestedges_.assign(2 * n_, 0);
        unused_.clear();
        for (int b = n_; b < 2 * n_; b++) unused_.push_back(b);
        dual_.assign(2 * n_, 0);
        for (int v = 0; v < n_; v++) dual_[v] = maxw;
        allow_.assign(m, 0);

        for (int stage = 0; stage < n_; stage++) {
            std::fill(label_.begin(), label_.end(), 0);
            std::fill(bestedge_.begin(), bestedge_.end(), -1);
            for (int b = n_; b < 2 * n_; b++) {
                bestedges_[b].clear();
                has_bestedges_[b] = 0;
            }
            std::fill(allow_.begin(), allow_.end(), 0);
            queue_.clear();
            for (int v = 0; v < n_; v++) {
                if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);
            }
            bool augmented = false;
            for (;;) {
                while (!queue_.empty() && !augmented) {
                    int v = queue_.back();
                    queue_.pop_back();
                    for (int p : neighbend_[v]) {
                        int k = p / 2, w = endpoint_[p];
                        if (inblossom_[v] == inblossom_[w]) continue;
                        int64_t kslack = 0;
                        if (!allow_[k]) {
                            kslack = slack(k);
                            if (kslack <= 0) allow_[k] = 1;
                        }
                        if (allow_[k]) {
                            if (label_[inblossom_[w]] == 0) {
                                assign_label(w, 2, p ^ 1);
                            } else if (label_[inblossom_[w]] == 1) {
                                int base = scan_blossom(v, w);
                                if (base >= 0) {
                                    add_blossom(base, k);
                                } else {
                                    augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if (label_[w] == 0) {
                                label_[w] = 2;
                                labelend_[w] = p ^ 1;
                            }
                        } else if (label_[inblossom_[w]] == 1) {
                            int b = inblossom_[v];
                            if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
                        } else if (label_[w] == 0) {
                            if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
                        }
                    }
                }
                if (augmented) break;

                int type = -1, dedge = -1, dblossom = -1;
                int64_t delta = 0;
                if (!max_card_) {
                    type = 1;
                    delta = *std::min_element(dual_.begin(), dual_.begin() + n_);
                }
                for (int v = 0; v < n_; v++) {
                    if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
                        int64_t d = slack(bestedge_[v]);
                        if (type == -1 || d < delta) {
                            delta = d;
                            type = 2;
                            dedge = bestedge_[v];
                        }
                    }
                }
                for (int b = 0; b < 2 * n_; b++) {
                    if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
                        int64_t d = slack(bestedge_[b]) / 2;
                        if (type == -1 || d < delta) {
                            delta = d;
                            type = 3;
                            dedge = bestedge_[b];
                        }
                    }
                }
                for (int b = n_; b < 2 * n_; b++) {
                    if (base_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
                        (type == -1 || dual_[b] < delta)) {
                        delta = dual_[b];
                        type = 4;
                        dblossom = b;
                    }
                }
                if (type == -1) {
                    type = 1;
                    delta = std::max<int64_t>(0, *std::min_element(dual_.begin(), dual_.begin() + n_));
                }
                for (int v = 0; v < n_; v++) {
                    int l = label_[inblossom_[v]];
                    if (l == 1) dual_[v] -= delta;
                    else if (l == 2) dual_[v] += delta;
                }
                for (int b = n_; b < 2 * n_; b++) {
                    if (base_[b] >= 0 && blossomparent_[b] == -1) {
                        if (label_[b] == 1) dual_[b] += delta;
                        else if (label_[b] == 2) dual_[b] -= delta;
                    }
                }
                if (type == 1) break;
                if (type == 2) {
                    allow_[dedge] = 1;
                    int i = edges_[dedge].u, j = edges_[dedge].v;
                    if (label_[inblossom_[i]] == 0) std::swap(i, j);
                    queue_.push_back(i);
                } else if (type == 3) {
                    allow_[dedge] = 1;
                    queue_.push_back(edges_[dedge].u);
                } else {
                    expand_blossom(dblossom, false);
                }
            }
            if (!augmented) break;
            for (int b = n_; b < 2 * n_; b++) {
                if (blossomparent_[b] == -1 && base_[b] >= 0 && label_[b] == 1 && dual_[b] == 0) {
                    expand_blossom(b, true);
                }
            }
        }
        std::vector<int> out(n_, -1);
        for (int v = 0; v < n_; v++) {
            if (mate_[v] >= 0) out[v] = endpoint_[mate_[v]];
        }
        return out;
    }

  private:
    int64_t slack(int k) const { return dual_[edges_[k].u] + dual_[edges_[k].v] - 2 * edges_[k].w; }

    void leaves(int b, std::vector<int> &out) const {
        if (b < n_) {
            out.push_back(b);
            return;
        }
        for (int t : childs_[b]) leaves(t, out);
    }

    std::vector<int> leaves(int b) const {
        std::vector<int> out;
        leaves(b, out);
        return out;
    }

    void assign_label(int w, int t, int p) {
        int b = inblossom_[w];
        label_[w] = label_[b] = t;
        labelend_[w] = labelend_[b] = p;
        bestedge_[w] = bestedge_[b] = -1;
        if (t == 1) {
            leaves(b, queue_);
        } else if (t == 2) {
            int base = base_[b];
            assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
        }
    }

    int scan_blossom(int v, int w) {
        std::vector<int> path;
        int base = -1;
        while (v != -1 || w != -1) {
            int b = inblossom_[v];
            if (label_[b] & 4) {
                base = base_[b];
                break;
            }
            path.push_back(b);
            label_[b] = 5;
            if (labelend_[b] == -1) {
                v = -1;
            } else {
                v = endpoint_[labelend_[b]];
                b = inblossom_[v];
                v = endpoint_[labelend_[b]];
            }
            if (w != -1) std::swap(v, w);
        }
        for (int b : path) label_[b] = 1;
        return base;
    }

    void add_blossom(int base, int k) {
        int v = edges_[k].u, w = edges_[k].v;
        int bb = inblossom_[base], bv = inblossom_[v], bw = inblossom_[w];
        int b = unused_.back();
        unused_.pop_back();
        base_[b] = base;
        blossomparent_[b] = -1;
        blossomparent_[bb] = b;
        std::vector<int> &path = childs_[b];
        std::vector<int> &endps = endps_[b];
        path.clear();
        endps.clear();
        while (bv != bb) {
            blossomparent_[bv] = b;
            path.push_back(bv);
            endps.push_back(labelend_[bv]);
            v = endpoint_[labelend_[bv]];
            bv = inblossom_[v];
        }
        path.push_back(bb);
        std::reverse(path.begin(), path.end());
        std::reverse(endps.begin(), endps.end());
        endps.push_back(2 * k);
        while (bw != bb) {
            blossomparent_[bw] = b;
            path.push_back(bw);
            endps.push_back(labelend_[bw] ^ 1);
            w = endpoint_[labelend_[bw]];
            bw = inblossom_[w];
        }
        label_[b] = 1;
        labelend_[b] = labelend_[bb];
        dual_[b] = 0;
        for (int x : leaves(b)) {
            if (label_[inblossom_[x]] == 2) queue_.push_back(x);
            inblossom_[x] = b;
        }
        std::vector<int> bestto(2 * n_, -1);
        for (int c : path) {
            std::vector<int> ks;
            if (!has_bestedges_[c]) {
                for (int x : leaves(c)) {
                    for (int p : neighbend_[x]) ks.push_back(p / 2);
                }
            } else {
                ks = bestedges_[c];
            }
            for (int kk : ks) {
                int i = edges_[kk].u, j = edges_[kk].v;
                if (inblossom_[j] == b) std::swap(i, j);
                int bj = inblossom_[j];
                if (bj != b && label_[bj] == 1 && (bestto[bj] == -1 || slack(kk) < slack(bestto[bj]))) {
                    bestto[bj] = kk;
                }
            }
            bestedges_[c].clear();
            has_bestedges_[c] = 0;
            bestedge_[c] = -1;
        }
        bestedges_[b].clear();
        for (int kk : bestto) {
            if (kk != -1) bestedges_[b].push_back(kk);
        }
        has_bestedges_[b] = 1;
        bestedge_[b] = -1;
        for (int kk : bestedges_[b]) {
            if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
        }
    }

    void expand_blossom(int b, bool endstage) {
        std::vector<int> kids = childs_[b];
        for (int s : kids) {
            blossomparent_[s] = -1;
            if (s < n_) {
                inblossom_[s] = s;
            } else if (endstage && dual_[s] == 0) {
                expand_blossom(s, endstage);
            } else {
                for (int x : leaves(s)) inblossom_[x] = s;
            }
        }
        if (!endstage && label_[b] == 2) {
            const std::vector<int> &ch = childs_[b];
            const std::vector<int> &ep = endps_[b];
            int len = (int)ch.size();
            auto at = [&](const std::vector<int> &vec, int j) { return vec[((j % len) + len) % len]; };
            int entry = inblossom_[endpoint_[labelend_[b] ^ 1]];
            int j = (int)(std::find(ch.begin(), ch.end(), entry) - ch.begin());
            int jstep, trick;
            if (j & 1) {
                j -= len;
                jstep = 1;
                trick = 0;
            } else {
                jstep = -1;
                trick = 1;
            }
            int p = labelend_[b];
            while (j != 0) {
                label_[endpoint_[p ^ 1]] = 0;
                label_[endpoint_[at(ep, j - trick) ^ trick ^ 1]] = 0;
                assign_label(endpoint_[p ^ 1], 2, p);
                allow_[at(ep, j - trick) / 2] = 1;
                j += jstep;
                p = at(ep, j - trick) ^ trick;
                allow_[p / 2] = 1;
                j += jstep;
            }
            int bv = at(ch, j);
            label_[endpoint_[p ^ 1]] = label_[bv] = 2;
            labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
            bestedge_[bv] = -1;
            j += jstep;
            while (at(ch, j) != entry) {
                bv = at(ch, j);
                if (label_[bv] == 1) {
                    j += jstep;
                    continue;
                }
                int found = -1;
                for (int x : leaves(bv)) {
                    if (label_[x] != 0) {
                        found = x;
                        break;
                    }
                }
                if (found >= 0) {
                    label_[found] = 0;
                    label_[endpoint_[mate_[base_[bv]]]] = 0;
                    assign_label(found, 2, labelend_[found]);
                }
                j += jstep;
            }
        }
        label_[b] = labelend_[b] = -1;
        childs_[b].clear();
        endps_[b].clear();
        base_[b] = -1;
        bestedges_[b].clear();
        has_bestedges_[b] = 0;
        bestedge_[b] = -1;
        unused_.push_back(b);
    }

    void augment_blossom(int b, int v) {
        int t = v;
        while (blossomparent_[t] != b) t = blossomparent_[t];
        if (t >= n_) augment_blossom(t, v);
        std::vector<int> &ch = childs_[b];
        std::vector<int> &ep = endps_[b];
        int len = (int)ch.size();
        auto at = [&](const std::vector<int> &vec, int j) { return vec[((j % len) + len) % len]; };
        int i = (int)(std::find(ch.begin(), ch.end(), t) - ch.begin());
        int j = i, jstep, trick;
        if (i & 1) {
            j -= len;
            jstep = 1;
            trick = 0;
        } else {
            jstep = -1;
            trick = 1;
        }
        while (j != 0) {
            j += jstep;
            t = at(ch, j);
            int p = at(ep, j - trick) ^ trick;
            if (t >= n_) augment_blossom(t, endpoint_[p]);
            j += jstep;
            t = at(ch, j);
            if (t >= n_) augment_blossom(t, endpoint_[p ^ 1]);
            mate_[endpoint_[p]] = p ^ 1;
            mate_[endpoint_[p ^ 1]] = p;
        }
        std::rotate(ch.begin(), ch.begin() + i, ch.end());
        std::rotate(ep.begin(), ep.begin() + i, ep.end());
        base_[b] = base_[ch[0]];
    }

    void augment_matching(int k) {
        int ends[2][2] = {{edges_[k].u, 2 * k + 1}, {edges_[k].v, 2 * k}};
        for (auto &sp : ends) {
            int s = sp[0], p = sp[1];
            for (;;) {
                int bs = inblossom_[s];
                if (bs >= n_) augment_blossom(bs, s);
                mate_[s] = p;
                if (labelend_[bs] == -1) break;
                int t = endpoint_[labelend_[bs]];
                int bt = inblossom_[t];
                s = endpoint_[labelend_[bt]];
                int j = endpoint_[labelend_[bt] ^ 1];
                if (bt >= n_) augment_blossom(bt, j);
                mate_[j] = labelend_[bt];
                p = labelend_[bt] ^ 1;
            }
        }
    }

    int n_;
    const std::vector<WeightedEdge> &edges_;
    bool max_card_;
    std::vector<int> endpoint_;
    std::vector<std::vector<int>> neighbend_;
    std::vector<int> mate_, label_, labelend_, inblossom_, blossomparent_;
    std::vector<std::vector<int>> childs_, endps_;
    std::vector<int> base_, bestedge_;
    std::vector<std::vector<int>> bestedges_;
    std::vector<uint8_t> has_bestedges_;
    std::vector<int> unused_;
    std::vector<int64_t> dual_;
    std::vector<uint8_t> allow_;
    std::vector<int> queue_;
};

}  // namespace

std::vector<int> max_weight_matching(int num_vertices, const std::vector<WeightedEdge> &edges, bool max_cardinality) {
    if (num_vertices <= 0) return {};
    return Blossom(num_vertices, edges, max_cardinality).run();
}

}  // namespace snaq

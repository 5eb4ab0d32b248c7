#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "selftrain/backend.hpp"

namespace selftrain {

// Client side of the external classifier protocol: newline-delimited JSON
// over the child process's stdin/stdout, one request in flight at a time.
//
//   hello:    {"op":"hello","version":1}
//             -> {"ok":true,"classes":["positive","negative"]}
//   predict:  {"op":"predict","texts":[...]} -> {"probs":[[p_pos,p_neg],...]}
//   train:    {"op":"train","examples":[{"text":...,"label":...},...],
//              "epochs":N} -> {"ok":true}
//   shutdown: {"op":"bye"} -> peer exits 0
//
// Predict requests are chunked to config.batch_size texts per message.
// A dead peer raises BackendLostError; a malformed reply raises
// ProtocolError carrying the raw line.
class ExternalBackend final : public ClassifierBackend {
public:
    // Spawns the peer (argv[0] = executable) and performs the handshake.
    ExternalBackend(std::vector<std::string> command, BackendConfig config);
    ~ExternalBackend() override;

    ExternalBackend(const ExternalBackend&) = delete;
    ExternalBackend& operator=(const ExternalBackend&) = delete;

    std::vector<Prediction> predict_batch(
        std::span<const Utterance> utterances) override;
    void train(std::span<const TrainExample> examples, size_t epochs) override;
    std::string name() const override { return "external"; }

    // Sends bye and reaps the child. Safe to call twice.
    void shutdown();

private:
    std::string roundtrip(const std::string& request_line);
    void spawn();
    void handshake();
    void reap(bool kill_first);

    std::vector<std::string> command_;
    BackendConfig config_;
    pid_t child_pid_ = -1;
    FILE* to_child_ = nullptr;
    FILE* from_child_ = nullptr;
};

} // namespace selftrain

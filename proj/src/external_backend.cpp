#include "selftrain/external_backend.hpp"

#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "selftrain/errors.hpp"

namespace selftrain {

using nlohmann::json;

ExternalBackend::ExternalBackend(std::vector<std::string> command,
                                 BackendConfig config)
    : command_(std::move(command)), config_(config) {
    if (command_.empty()) throw ConfigError("external backend needs a command");
    config_.validate();
    // A peer that dies mid-write must surface as EPIPE, not kill us.
    std::signal(SIGPIPE, SIG_IGN);
    spawn();
    handshake();
}

ExternalBackend::~ExternalBackend() {
    try {
        shutdown();
    } catch (...) {
        reap(true);
    }
}

void ExternalBackend::spawn() {
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) {
        throw BackendLostError("pipe() failed: " + std::string(strerror(errno)));
    }
    const pid_t pid = fork();
    if (pid < 0) {
        throw BackendLostError("fork() failed: " + std::string(strerror(errno)));
    }
    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        std::vector<char*> argv;
        argv.reserve(command_.size() + 1);
        for (auto& arg : command_) argv.push_back(arg.data());
        argv.push_back(nullptr);
        execvp(argv[0], argv.data());
        // Only reached when exec failed; the parent sees EOF and reports.
        _exit(127);
    }
    child_pid_ = pid;
    close(to_child[0]);
    close(from_child[1]);
    to_child_ = fdopen(to_child[1], "w");
    from_child_ = fdopen(from_child[0], "r");
    if (!to_child_ || !from_child_) {
        reap(true);
        throw BackendLostError("fdopen() failed for backend pipes");
    }
}

void ExternalBackend::reap(bool kill_first) {
    if (to_child_) {
        fclose(to_child_);
        to_child_ = nullptr;
    }
    if (from_child_) {
        fclose(from_child_);
        from_child_ = nullptr;
    }
    if (child_pid_ > 0) {
        int status = 0;
        if (!kill_first) {
            // Give a cooperative peer ~2s to exit on its own.
            for (int i = 0; i < 200; ++i) {
                if (waitpid(child_pid_, &status, WNOHANG) != 0) {
                    child_pid_ = -1;
                    return;
                }
                usleep(10000);
            }
        }
        kill(child_pid_, SIGKILL);
        waitpid(child_pid_, &status, 0);
        child_pid_ = -1;
    }
}

std::string ExternalBackend::roundtrip(const std::string& request_line) {
    if (!to_child_ || !from_child_) {
        throw BackendLostError("backend process is not running");
    }
    if (fputs(request_line.c_str(), to_child_) == EOF ||
        fputc('\n', to_child_) == EOF || fflush(to_child_) != 0) {
        reap(true);
        throw BackendLostError("backend process closed its input");
    }
    char* line = nullptr;
    size_t cap = 0;
    const ssize_t n = getline(&line, &cap, from_child_);
    if (n < 0) {
        free(line);
        reap(true);
        throw BackendLostError("backend process closed its output");
    }
    std::string response(line, static_cast<size_t>(n));
    free(line);
    while (!response.empty() && (response.back() == '\n' || response.back() == '\r')) {
        response.pop_back();
    }
    return response;
}

namespace {

json parse_response(const std::string& line) {
    try {
        return json::parse(line);
    } catch (const json::exception&) {
        throw ProtocolError("malformed backend response: " + line);
    }
}

} // namespace

void ExternalBackend::handshake() {
    json hello = {{"op", "hello"}, {"version", 1}};
    const auto reply = parse_response(roundtrip(hello.dump()));
    if (reply.value("ok", false) != true) {
        throw ProtocolError("backend refused the handshake: " + reply.dump());
    }
    const auto classes = reply.value("classes", json::array());
    if (classes != json::array({"positive", "negative"})) {
        throw ProtocolError("backend does not serve the positive/negative classes: " +
                            reply.dump());
    }
}

std::vector<Prediction> ExternalBackend::predict_batch(
    std::span<const Utterance> utterances) {
    std::vector<Prediction> out;
    out.reserve(utterances.size());
    const size_t chunk = config_.batch_size;
    for (size_t start = 0; start < utterances.size(); start += chunk) {
        const size_t end = std::min(start + chunk, utterances.size());
        json texts = json::array();
        for (size_t i = start; i < end; ++i) texts.push_back(utterances[i].text);
        json request = {{"op", "predict"}, {"texts", std::move(texts)}};

        std::string raw;
        try {
            raw = roundtrip(request.dump());
        } catch (BackendLostError& e) {
            throw BackendLostError(std::string(e.what()) + " (predict batch " +
                                   std::to_string(start / chunk) + ")");
        }
        const auto reply = parse_response(raw);
        if (!reply.contains("probs") || !reply["probs"].is_array()) {
            throw ProtocolError("predict response without probs: " + raw);
        }
        const auto& probs = reply["probs"];
        if (probs.size() != end - start) {
            throw ProtocolError("predict response count mismatch: sent " +
                                std::to_string(end - start) + " texts, got " +
                                std::to_string(probs.size()) + " pairs");
        }
        for (size_t i = start; i < end; ++i) {
            const auto& pair = probs[i - start];
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
                !pair[1].is_number()) {
                throw ProtocolError("malformed probability pair: " + pair.dump());
            }
            ProbVector pv{pair[0].get<double>(), pair[1].get<double>()};
            out.push_back(make_prediction(utterances[i].id, pv));
        }
    }
    return out;
}

void ExternalBackend::train(std::span<const TrainExample> examples, size_t epochs) {
    if (examples.empty()) return;
    json items = json::array();
    for (const auto& ex : examples) {
        if (ex.label == SentimentLabel::Neutral) {
            throw ConfigError("neutral label in a training example");
        }
        items.push_back({{"text", ex.text}, {"label", to_string(ex.label)}});
    }
    json request = {{"op", "train"}, {"examples", std::move(items)}, {"epochs", epochs}};
    const auto raw = roundtrip(request.dump());
    const auto reply = parse_response(raw);
    if (reply.value("ok", false) != true) {
        throw ProtocolError("train request not acknowledged: " + raw);
    }
}

void ExternalBackend::shutdown() {
    if (!to_child_ && child_pid_ <= 0) return;
    if (to_child_) {
        json bye = {{"op", "bye"}};
        fputs(bye.dump().c_str(), to_child_);
        fputc('\n', to_child_);
        fflush(to_child_);
    }
    reap(false);
}

} // namespace selftrain

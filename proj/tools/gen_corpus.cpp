// Regenerates the bundled sample corpus (400 posts: 3 planted topics of 75
// questions, 15 noise questions, 160 answers). The seed is frozen so the
// checked-in file never drifts.
#include <fstream>
#include <iostream>
#include <string>

#include "support/synth.hpp"

int main(int argc, char** argv) {
    std::string path = argc > 1 ? argv[1] : "data/sample_corpus.jsonl";
    synth::Params params;
    params.topic_count = 3;
    params.vocab_per_topic = 50;
    params.questions_per_topic = 75;
    params.noise_questions = 15;
    params.answered_per_topic = 50;
    params.answers_per_question = 1;
    params.noise_answered = 10;
    params.score_plan = synth::ScorePlan::cycle;
    params.seed = 7340;

    synth::Corpus corpus = synth::make_corpus(params);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        return 1;
    }
    out << synth::to_jsonl(corpus);
    if (!out) {
        std::cerr << "failed writing " << path << "\n";
        return 1;
    }
    std::cerr << "wrote " << corpus.posts.size() << " posts -> " << path << "\n";
    return 0;
}

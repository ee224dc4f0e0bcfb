/* Minimal C consumer: parse a model, read the predictive distribution,
 * update on an observed outcome.
 *
 * Build (from the repository root, after `cargo build -p hiprob-ffi`):
 *   cc -I crates/hiprob-ffi/include examples/predictive.c \
 *      -L target/debug -lhiprob_ffi -lm -o predictive
 *   LD_LIBRARY_PATH=target/debug ./predictive
 */
#include <stdio.h>
#include "hiprob.h"

static const char *MODEL =
    "worlds = [\"one\", \"two\", \"three\", \"four\", \"five\", \"six\"]\n"
    "\n"
    "[[candidates]]\n"
    "name = \"fair\"\n"
    "weights = [0.16666666666666666, 0.16666666666666666, 0.16666666666666666,\n"
    "           0.16666666666666666, 0.16666666666666666, 0.16666666666666666]\n"
    "\n"
    "[[candidates]]\n"
    "name = \"loaded\"\n"
    "weights = [0.1, 0.5, 0.1, 0.1, 0.1, 0.1]\n"
    "\n"
    "[second_order]\n"
    "fair = 0.5\n"
    "loaded = 0.5\n";

int main(void) {
    HiprobModel *model = NULL;
    if (hiprob_model_parse(MODEL, &model) != HiprobStatus_Ok) {
        fprintf(stderr, "parse failed: %s\n", hiprob_last_error_message());
        return 1;
    }

    size_t worlds = 0, candidates = 0;
    hiprob_model_world_count(model, &worlds);
    hiprob_model_candidate_count(model, &candidates);
    printf("model: %zu worlds, %zu candidates (hiprob %s)\n",
           worlds, candidates, hiprob_version());

    double prior_predictive[6];
    if (hiprob_model_predictive(model, prior_predictive, 6) != HiprobStatus_Ok) {
        fprintf(stderr, "predictive failed: %s\n", hiprob_last_error_message());
        hiprob_model_free(model);
        return 1;
    }
    printf("P(two) before any toss: %f\n", prior_predictive[1]);

    /* Observe one "two" (outcome index 1) and look again. */
    size_t observed[] = {1};
    double posterior[2], updated[6];
    hiprob_model_posterior(model, observed, 1, posterior, 2);
    hiprob_model_predictive_next(model, observed, 1, updated, 6);
    printf("posterior over {fair, loaded}: [%f, %f]\n", posterior[0], posterior[1]);
    printf("P(two) for the next toss: %f\n", updated[1]);

    hiprob_model_free(model);
    return 0;
}

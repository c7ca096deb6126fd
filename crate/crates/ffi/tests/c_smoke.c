#include <stdio.h>
#include <string.h>
#include "disco.h"

static int expect(const char *got, const char *want) {
    if (strcmp(got, want) != 0) {
        fprintf(stderr, "got [%s], want [%s]\n", got, want);
        return 1;
    }
    return 0;
}

int main(void) {
    DiscoSession *s = disco_session_new(true);
    char *out = NULL;
    int bad = 0;

    if (disco_session_exec(s, ":type -2/3", &out) != DISCO_STATUS_OK) return 2;
    bad |= expect(out, "-2 / 3 : \xe2\x84\x9a");
    disco_string_free(out);

    const char *src = "sq : N -> N\nsq(n) = n * n\n";
    if (disco_session_load(s, "sq.disco", src, &out) != DISCO_STATUS_OK) return 3;
    disco_string_free(out);

    if (disco_session_exec(s, "sq(12)", &out) != DISCO_STATUS_OK) return 4;
    bad |= expect(out, "144");
    disco_string_free(out);

    if (disco_session_exec(s, NULL, &out) != DISCO_STATUS_NULL_ARGUMENT) return 5;
    if (disco_last_error() == NULL) return 6;

    disco_session_free(s);
    printf("ok\n");
    return bad;
}

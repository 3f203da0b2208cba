#include <stdio.h>
#include <string.h>
#include "qvacheck.h"

int main(void) {
    QvcConfig *cfg = NULL;
    if (qvc_config_new("A1", "1", &cfg) != QVC_STATUS_OK) return 10;
    if (qvc_config_set_windows(cfg, 3, 6) != QVC_STATUS_OK) return 11;
    if (qvc_config_set_suites(cfg, "tau-tech0") != QVC_STATUS_OK) return 12;
    QvcResult *res = NULL;
    if (qvc_run(cfg, &res) != QVC_STATUS_OK) return 13;
    if (!qvc_result_passed(res)) return 14;
    if (strstr(qvc_result_json(res), "\"tau-tech0\"") == NULL) return 15;
    qvc_result_free(res);
    if (qvc_config_new("Z9", "1", &cfg) != QVC_STATUS_INVALID_GCM) return 16;
    if (strlen(qvc_last_error()) == 0) return 17;
    qvc_config_free(cfg);
    printf("ok %s\n", qvc_version());
    return 0;
}

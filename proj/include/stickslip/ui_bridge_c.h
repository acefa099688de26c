/* C entry points for embedding the core in a browser build. */
#ifndef STICKSLIP_UI_BRIDGE_C_H
#define STICKSLIP_UI_BRIDGE_C_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct stickslip_bridge stickslip_bridge;

stickslip_bridge* stickslip_bridge_create(void);

/* Returns a JSON array of outbound messages, or {"error": "..."} on failure.
   The string stays valid until the next call on the same bridge. */
const char* stickslip_bridge_handle(stickslip_bridge* bridge, const char* message_json);

void stickslip_bridge_destroy(stickslip_bridge* bridge);

#ifdef __cplusplus
}
#endif

#endif

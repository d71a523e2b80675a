"""Start a live looping demo session with the web-socket scope server.

Run: python demos/06_live_scope.py
Then open http://127.0.0.1:8089/ in a browser (if the scope UI bundle is
built) or connect any web-socket client to ws://127.0.0.1:8089/stream.

The demo simulation blinks once a second at 750 uV so band peaks sit around
130 uV: drag the threshold line to ~100 uV, enable bandA, and watch pin 31
fire. Ctrl+C stops it.
"""

from pieeg import presets
from pieeg.server import StreamServer
from pieeg.session import Session

config = presets.demo_session(seed=1, speed=1.0)
session = Session(config)
server = StreamServer(session, host="127.0.0.1", port=8089)
session.set_broadcast(server.publish)
server.start()
session.start()

print(f"scope:  http://127.0.0.1:{server.port}/")
print(f"stream: ws://127.0.0.1:{server.port}/stream")
print("simulating 1 Hz blinks in a loop; Ctrl+C to stop")
try:
    session.join()
except KeyboardInterrupt:
    print("\nstopping...")
    session.stop()
    session.join(timeout=10)
finally:
    server.stop()
